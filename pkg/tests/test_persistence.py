"""XML save/load: canonical bytes, structural roundtrips, document errors."""

from __future__ import annotations

import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_rich_model
from topoflow import (
    DocumentError,
    Model,
    add_circle,
    add_node,
    load_xml,
    members,
    place_star,
    save_xml,
    validate_xml,
)

DATA = Path(__file__).parent / "data"


def test_save_empty_model():
    data = save_xml(Model())
    assert data == b'<?xml version="1.0" encoding="UTF-8"?>\n<model version="1.0" next-id="1">\n</model>\n'
    assert load_xml(data) == Model()


def test_save_is_deterministic(education):
    assert save_xml(education.model) == save_xml(education.model)


def test_roundtrip_balls_preserves_fifo(balls):
    m = balls.model
    loaded = load_xml(save_xml(m))
    assert loaded == m
    blue = balls.circles["blue"]
    assert [i.display_name for i in members(loaded, blue)] == [
        "blue ball 1", "blue ball 2",
    ]


def test_roundtrip_example_models(meeting, education):
    for model in (meeting.model, education.model):
        assert load_xml(save_xml(model)) == model


def test_hand_written_document_is_canonical():
    raw = (DATA / "enrollment.topo.xml").read_bytes()
    assert validate_xml(raw) == []
    model = load_xml(raw)
    assert save_xml(model) == raw  # a careful hand writes exactly canonical form


def test_examples_validate_against_schema(meeting, education):
    assert validate_xml(save_xml(meeting.model)) == []
    assert validate_xml(save_xml(education.model)) == []


def test_load_bare_model_element():
    assert load_xml(b"<model/>") == Model()


def test_validate_requires_version():
    assert validate_xml(b"<model/>") == ["missing mandatory version attribute"]


def test_malformed_xml():
    with pytest.raises(DocumentError, match="malformed"):
        load_xml(b"<model version='1.0'")


def test_dangling_star_reference_names_id():
    doc = (
        b'<model version="1.0">'
        b'<node id="1" name="a"/><star id="2" identity="1" circle="77"/>'
        b"</model>"
    )
    with pytest.raises(DocumentError, match="77"):
        load_xml(doc)


def test_unsupported_major_version():
    with pytest.raises(DocumentError, match="major"):
        load_xml(b'<model version="2.0"/>')


def test_newer_minor_ignores_unknown_elements(caplog):
    doc = b'<model version="1.9"><node id="1" name="a"/><hologram id="2"/></model>'
    with caplog.at_level("WARNING"):
        model = load_xml(doc)
    assert list(model.nodes) == [1]
    assert "hologram" in caplog.text


def test_unknown_element_in_current_version_fails():
    with pytest.raises(DocumentError, match="hologram"):
        load_xml(b'<model version="1.0"><hologram id="2"/></model>')


def test_duplicate_id_rejected():
    doc = b'<model version="1.0"><node id="1" name="a"/><node id="1" name="b"/></model>'
    with pytest.raises(DocumentError, match="duplicate"):
        load_xml(doc)


def test_broken_invariants_rejected():
    # two stars of one identity in one circle
    doc = (
        b'<model version="1.0">'
        b'<node id="1" name="a"/><node id="2" name="b"/>'
        b'<circle id="3" owner="1" name="c"/>'
        b'<star id="4" identity="2" circle="3"/><star id="5" identity="2" circle="3"/>'
        b"</model>"
    )
    with pytest.raises(DocumentError, match="twice"):
        load_xml(doc)


def test_roundtrip_random_models_sample():
    rng = random.Random(99)
    for _ in range(60):
        model = random_rich_model(rng)
        data = save_xml(model)
        assert load_xml(data) == model
        assert save_xml(load_xml(data)) == data


_xml_name = st.text(
    alphabet=st.characters(
        codec="utf-8",
        exclude_categories=("Cs", "Cc"),  # XML 1.0 cannot carry raw control chars
    ),
    min_size=1,
    max_size=30,
)


@given(st.lists(_xml_name, min_size=1, max_size=6), _xml_name)
@settings(max_examples=80, deadline=None)
def test_roundtrip_survives_hostile_names(names, circle_name):
    m = Model()
    owner = add_node(m, names[0])
    m.nodes[owner].attributes[circle_name] = names[-1]
    circle = add_circle(m, owner, circle_name)
    for name in names[1:]:
        node = add_node(m, name)
        place_star(m, node, circle)
    assert load_xml(save_xml(m)) == m
