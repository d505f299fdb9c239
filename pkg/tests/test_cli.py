"""Command-line behavior: exit codes, outputs, error JSON."""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from topoflow import Model, delete_element, save_xml
from topoflow.cli import main
from topoflow.examples import education_model, meeting_model

REPO = Path(__file__).parent.parent
SAMPLES = REPO / "sample_models"


@pytest.fixture
def education_file(tmp_path):
    path = tmp_path / "education.topo.xml"
    path.write_bytes(save_xml(education_model().model))
    return str(path)


def test_shipped_samples_match_builders():
    assert (SAMPLES / "meeting.topo.xml").read_bytes() == save_xml(meeting_model().model)
    assert (SAMPLES / "education.topo.xml").read_bytes() == save_xml(education_model().model)


def test_validate_ok(tmp_path, capsys):
    path = tmp_path / "empty.topo.xml"
    path.write_bytes(save_xml(Model()))
    assert main(["validate", str(path)]) == 0
    assert "ok" in capsys.readouterr().out


def test_validate_rejects_garbage(tmp_path, capsys):
    path = tmp_path / "bad.topo.xml"
    path.write_bytes(b"<model version='1.0'><star id='1' identity='9' circle='9'/></model>")
    assert main(["validate", str(path)]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "invalid-document"


def test_simulate_twice_identical(education_file, tmp_path):
    out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert main(["simulate", education_file, "--seed", "1", "--trace", str(out1)]) == 0
    assert main(["simulate", education_file, "--seed", "1", "--trace", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert len(out1.read_text().splitlines()) == 34


def test_simulate_to_stdout(education_file, capsys):
    assert main(["simulate", education_file]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert json.loads(lines[0])["kind"] == "token_created"


def test_lint_clean_exits_zero(education_file, capsys):
    assert main(["lint", education_file]) == 0
    assert "no findings" in capsys.readouterr().out


def test_lint_missing_binding_exits_one(tmp_path, capsys):
    ex = education_model()
    delete_element(ex.model, ex.binding_evaluation)
    path = tmp_path / "broken.topo.xml"
    path.write_bytes(save_xml(ex.model))
    assert main(["lint", str(path)]) == 1
    assert "L2" in capsys.readouterr().out


def test_lint_strict_fails_on_warning(tmp_path, capsys):
    ex = education_model()
    delete_element(ex.model, ex.directives_dot)  # L4 warning only
    path = tmp_path / "warned.topo.xml"
    path.write_bytes(save_xml(ex.model))
    assert main(["lint", str(path)]) == 0
    assert main(["lint", str(path), "--strict"]) == 1


def test_lint_jsonl_format(tmp_path, capsys):
    ex = education_model()
    delete_element(ex.model, ex.binding_evaluation)
    path = tmp_path / "broken.topo.xml"
    path.write_bytes(save_xml(ex.model))
    main(["lint", str(path), "--format", "jsonl"])
    lines = capsys.readouterr().out.strip().splitlines()
    assert all(json.loads(line)["rule"] for line in lines)


def test_export_dot(education_file, capsys):
    assert main(["export", education_file, "--view", "merged", "--format", "dot"]) == 0
    assert capsys.readouterr().out.startswith("digraph model {")


def test_export_json_with_filter(education_file, capsys):
    assert main([
        "export", education_file, "--view", "object", "--format", "json",
        "--filter", "Lesson*", "--show-stars",
    ]) == 0
    doc = json.loads(capsys.readouterr().out)
    names = [e["name"] for e in doc["elements"]]
    assert "Lessons" not in names
    assert doc["sim"]["stars"]


def test_missing_file_error_json(capsys):
    assert main(["lint", "/nowhere/x.topo.xml"]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "missing-file"


def test_console_entry_point(education_file):
    result = subprocess.run(
        [sys.executable, "-m", "topoflow.cli", "lint", education_file],
        capture_output=True, text=True,
    )
    assert result.returncode == 0
    assert "no findings" in result.stdout
