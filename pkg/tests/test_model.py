"""Structural operations and invariants of the element graph."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topoflow import (
    DotKind,
    Model,
    ModelError,
    RelationKind,
    add_circle,
    add_node,
    add_relation,
    check_integrity,
    connect_arc,
    delete_element,
    insert_dot,
    instantiate_association,
    members,
    place_star,
    placements,
)


def test_add_node_starts_bare():
    m = Model()
    node = add_node(m, "Balls")
    assert m.nodes[node].circles == []
    assert m.nodes[node].identity.display_name == "Balls"


def test_add_node_rejects_empty_name():
    with pytest.raises(ModelError):
        add_node(Model(), "")


def test_gate_node_is_a_dot():
    m = Model()
    node = add_node(m, "gate-1", dot_kind=DotKind.GATE)
    assert m.nodes[node].dot_kind == DotKind.GATE


def test_five_circles(balls):
    assert len(balls.model.nodes[balls.balls].circles) == 5


def test_add_circle_unknown_node():
    with pytest.raises(ModelError):
        add_circle(Model(), 99, "x")


def test_add_circle_duplicate_name(balls):
    with pytest.raises(ModelError):
        add_circle(balls.model, balls.balls, "blue")


def test_circle_membership_fifo(balls):
    names = [i.display_name for i in members(balls.model, balls.circles["blue"])]
    assert names == ["blue ball 1", "blue ball 2"]
    assert [i.display_name for i in members(balls.model, balls.circles["green"])] == [
        "green ball 1"
    ]


def test_placements_multiple_membership():
    m = Model()
    circles = {}
    for name in ("Person", "Student", "Employee", "Playing football"):
        owner = add_node(m, name)
        circles[name] = add_circle(m, owner, name)
    john = add_node(m, "John")
    for circle in circles.values():
        place_star(m, john, circle)
    assert placements(m, john) == set(circles.values())


def test_placements_empty():
    m = Model()
    node = add_node(m, "loner")
    assert placements(m, node) == set()


def test_duplicate_placement_rejected(balls):
    with pytest.raises(ModelError):
        place_star(balls.model, balls.blue_1, balls.circles["blue"])


def test_members_unknown_circle(balls):
    with pytest.raises(ModelError):
        members(balls.model, 12345)


def test_linear_chain_arcs():
    m = Model()
    names = ["Initialisation", "Select participants", "Propose date", "Select date", "Reserve room"]
    nodes = [add_node(m, n) for n in names]
    arcs = [connect_arc(m, a, b) for a, b in zip(nodes, nodes[1:])]
    assert len(arcs) == 4
    assert [m.arcs[a].src for a in arcs] == nodes[:-1]
    assert [m.arcs[a].dst for a in arcs] == nodes[1:]


def test_self_loop_rejected():
    m = Model()
    node = add_node(m, "a")
    with pytest.raises(ModelError):
        connect_arc(m, node, node)


def test_insert_dot():
    m = Model()
    a, b = add_node(m, "Studying"), add_node(m, "Student association")
    arc = connect_arc(m, a, b)
    dot = add_node(m, "dup", dot_kind=DotKind.DUPLICATE)
    insert_dot(m, arc, dot)
    assert m.arcs[arc].dots == [dot]


def test_insert_non_dot_rejected():
    m = Model()
    a, b, c = add_node(m, "a"), add_node(m, "b"), add_node(m, "c")
    arc = connect_arc(m, a, b)
    with pytest.raises(ModelError):
        insert_dot(m, arc, c)


def test_no_dot_after_gate():
    m = Model()
    a, b = add_node(m, "a"), add_node(m, "b")
    arc = connect_arc(m, a, b)
    gate = add_node(m, "g", dot_kind=DotKind.GATE)
    insert_dot(m, arc, gate)
    dup = add_node(m, "d", dot_kind=DotKind.DUPLICATE)
    with pytest.raises(ModelError):
        insert_dot(m, arc, dup, position=1)
    insert_dot(m, arc, dup, position=0)  # before the gate is fine
    assert m.arcs[arc].dots == [dup, gate]


def test_single_gate_per_arc():
    m = Model()
    a, b = add_node(m, "a"), add_node(m, "b")
    arc = connect_arc(m, a, b)
    insert_dot(m, arc, add_node(m, "g1", dot_kind=DotKind.GATE))
    with pytest.raises(ModelError):
        insert_dot(m, arc, add_node(m, "g2", dot_kind=DotKind.GATE))


def test_gate_must_be_last():
    m = Model()
    a, b = add_node(m, "a"), add_node(m, "b")
    arc = connect_arc(m, a, b)
    insert_dot(m, arc, add_node(m, "d", dot_kind=DotKind.DUPLICATE))
    gate = add_node(m, "g", dot_kind=DotKind.GATE)
    with pytest.raises(ModelError):
        insert_dot(m, arc, gate, position=0)
    insert_dot(m, arc, gate)
    assert m.arcs[arc].dots[-1] == gate


def test_dot_lives_on_one_arc():
    m = Model()
    a, b, c = add_node(m, "a"), add_node(m, "b"), add_node(m, "c")
    arc1, arc2 = connect_arc(m, a, b), connect_arc(m, b, c)
    dot = add_node(m, "d", dot_kind=DotKind.DUPLICATE)
    insert_dot(m, arc1, dot)
    with pytest.raises(ModelError):
        insert_dot(m, arc2, dot)


def test_relation_endpoint_typecheck():
    m = Model()
    node = add_node(m, "n")
    circle = add_circle(m, node, "c")
    with pytest.raises(ModelError):
        add_relation(m, RelationKind.ASSOCIATION, circle, node)
    with pytest.raises(ModelError):
        add_relation(m, RelationKind.FLOW_BINDING, node, circle)


def test_dots_cannot_source_flows():
    m = Model()
    a, b = add_node(m, "a"), add_node(m, "b")
    arc = connect_arc(m, a, b)
    dot = add_node(m, "d", dot_kind=DotKind.LABEL)
    dot_circle = add_circle(m, dot, "contents")
    with pytest.raises(ModelError):
        add_relation(m, RelationKind.FLOW_BINDING, dot_circle, arc)
    # but dots may carry circles and ordinary relations
    plain = add_circle(m, a, "plain")
    add_relation(m, RelationKind.ASSOCIATION, dot_circle, plain)


def test_single_root_pilot():
    m = Model()
    pilot1, pilot2 = add_node(m, "P"), add_node(m, "Q")
    target = add_node(m, "process")
    add_relation(m, RelationKind.PILOT, pilot1, target, root_flag=True)
    with pytest.raises(ModelError):
        add_relation(m, RelationKind.PILOT, pilot2, target, root_flag=True)
    # a non-root delegate may coexist
    add_relation(m, RelationKind.PILOT, pilot2, target)


def test_instantiate_association_fans_out():
    m = Model()
    x = add_node(m, "X")
    y = add_node(m, "Y")
    cx, cy = add_circle(m, x, "X"), add_circle(m, y, "Y")
    objects = {}
    for name in ("x1", "x2", "y1", "y2", "y3", "y4"):
        objects[name] = add_node(m, name)
    stars = {
        name: place_star(m, objects[name], cx if name.startswith("x") else cy)
        for name in objects
    }
    assoc = add_relation(m, RelationKind.ASSOCIATION, cx, cy)
    pairs = [("x1", "y1"), ("x1", "y3"), ("x2", "y2"), ("x2", "y4")]
    links = [
        instantiate_association(m, assoc, stars[a], stars[b]) for a, b in pairs
    ]
    assert len(links) == 4
    for link_id in links:
        assert m.relations[link_id].parent == assoc


def test_instance_link_requires_matching_circles():
    m = Model()
    a, b, c = add_node(m, "A"), add_node(m, "B"), add_node(m, "C")
    ca, cb, cc = add_circle(m, a, "a"), add_circle(m, b, "b"), add_circle(m, c, "c")
    assoc = add_relation(m, RelationKind.ASSOCIATION, ca, cb)
    o1, o2 = add_node(m, "o1"), add_node(m, "o2")
    s1 = place_star(m, o1, ca)
    s2 = place_star(m, o2, cc)
    with pytest.raises(ModelError):
        instantiate_association(m, assoc, s1, s2)


def test_delete_circle_cascades(balls):
    m = balls.model
    blue = balls.circles["blue"]
    delete_element(m, blue)
    assert blue not in m.circles
    assert placements(m, balls.blue_1) == set()
    assert check_integrity(m) == []


def test_delete_association_removes_links():
    m = Model()
    a, b = add_node(m, "A"), add_node(m, "B")
    ca, cb = add_circle(m, a, "a"), add_circle(m, b, "b")
    o1, o2 = add_node(m, "o1"), add_node(m, "o2")
    s1, s2 = place_star(m, o1, ca), place_star(m, o2, cb)
    assoc = add_relation(m, RelationKind.ASSOCIATION, ca, cb)
    link = instantiate_association(m, assoc, s1, s2)
    delete_element(m, assoc)
    assert link not in m.relations
    assert check_integrity(m) == []


def test_delete_node_cascades_everything(meeting):
    m = meeting.model
    delete_element(m, meeting.stages[1])  # owns the participant circle
    assert check_integrity(m) == []
    delete_element(m, meeting.meeting_class)  # owns the bound meeting circle
    assert check_integrity(m) == []


# ---------------------------------------------------------------------------
# generative invariants

_ops = st.lists(
    st.tuples(st.sampled_from(["node", "circle", "star", "arc", "dot", "assoc", "link", "delete"]),
              st.integers(min_value=0, max_value=10 ** 6)),
    max_size=60,
)


@given(_ops, st.randoms(use_true_random=False))
@settings(max_examples=120, deadline=None)
def test_random_operation_soup_keeps_integrity(ops, rng):
    """Any sequence of mutations and cascading deletions leaves the graph sound."""
    m = Model()
    for op, pick in ops:
        try:
            if op == "node":
                kind = rng.choice([None, DotKind.DUPLICATE, DotKind.LABEL, DotKind.GATE])
                add_node(m, f"n{pick}", dot_kind=kind)
            elif op == "circle" and m.nodes:
                owner = rng.choice(sorted(m.nodes))
                add_circle(m, owner, f"c{pick}")
            elif op == "star" and m.nodes and m.circles:
                place_star(m, rng.choice(sorted(m.nodes)), rng.choice(sorted(m.circles)))
            elif op == "arc" and len(m.nodes) >= 2:
                src, dst = rng.sample(sorted(m.nodes), 2)
                connect_arc(m, src, dst)
            elif op == "dot" and m.arcs and m.nodes:
                insert_dot(m, rng.choice(sorted(m.arcs)), rng.choice(sorted(m.nodes)))
            elif op == "assoc" and m.circles:
                add_relation(
                    m, RelationKind.ASSOCIATION,
                    rng.choice(sorted(m.circles)), rng.choice(sorted(m.circles)),
                )
            elif op == "link" and m.stars:
                assocs = [
                    r.id for r in m.relations.values()
                    if r.kind == RelationKind.ASSOCIATION
                ]
                if assocs:
                    instantiate_association(
                        m, rng.choice(assocs),
                        rng.choice(sorted(m.stars)), rng.choice(sorted(m.stars)),
                    )
            elif op == "delete":
                everything = sorted(
                    set(m.nodes) | set(m.circles) | set(m.stars)
                    | set(m.arcs) | set(m.relations)
                )
                if everything:
                    delete_element(m, rng.choice(everything))
        except ModelError:
            pass  # rejected operations must not corrupt anything
        assert check_integrity(m) == []


@given(st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_deletion_closure_on_example(rng):
    """Deleting any element of a real model leaves a referentially intact graph."""
    from topoflow.examples import education_model

    m = education_model().model
    everything = sorted(
        set(m.nodes) | set(m.circles) | set(m.stars) | set(m.arcs)
        | set(m.relations) | set(m.services)
    )
    victim = rng.choice(everything)
    delete_element(m, victim)
    assert check_integrity(m) == []
