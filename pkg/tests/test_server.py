"""HTTP API: endpoints, event stream, edit conflicts."""

from __future__ import annotations

import json
import threading
import time

import pytest
from fastapi.testclient import TestClient

from topoflow import Model, SimConfig, init_sim, step
from topoflow.examples import education_model
from topoflow.server import create_app


@pytest.fixture
def education_app():
    return create_app(education_model().model)


@pytest.fixture
def client(education_app):
    return TestClient(education_app)


def _sse_events(response_lines, count):
    events = []
    for line in response_lines:
        if line.startswith("data: "):
            events.append(json.loads(line[len("data: "):]))
            if len(events) == count:
                break
    return events


def test_get_model(client, education):
    doc = client.get("/model").json()
    names = {n["name"] for n in doc["nodes"]}
    assert {"Evaluation", "Faculty", "Form processing"} <= names
    assert doc["next_id"] == education.model.next_id


def test_get_view_empty_model():
    client = TestClient(create_app(Model()))
    doc = client.get("/view", params={"kind": "merged"}).json()
    assert doc["elements"] == [] and doc["edges"] == []


def test_get_view_filters(client):
    doc = client.get(
        "/view", params={"kind": "object", "filter": ["Lesson*"]}
    ).json()
    assert all(e["name"] != "Lessons" for e in doc["elements"])


def test_view_rejects_unknown_kind(client):
    assert client.get("/view", params={"kind": "sideways"}).status_code == 400


def test_lint_endpoint(client):
    assert client.get("/lint").json() == {"findings": []}


def test_step_parity_with_kernel(client):
    client.post("/sim/init", json={"seed": 0})
    response = client.post("/sim/step")
    assert response.status_code == 200
    server_events = response.json()["events"]

    sim = init_sim(education_model().model, SimConfig(seed=0))
    kernel_events = [json.loads(e.to_json()) for e in step(sim)]
    assert server_events == kernel_events
    assert server_events[0]["kind"] == "token_created"


def test_step_requires_init(client):
    assert client.post("/sim/step").status_code == 400


def test_run_to_completion(client):
    client.post("/sim/init", json={})
    body = client.post("/sim/run", json={}).json()
    assert body["done"] is True
    assert len(body["events"]) == 34
    status = client.get("/sim").json()
    assert status["pending"] == 0 and status["events"] == 34


def test_run_until(client):
    client.post("/sim/init", json={})
    body = client.post("/sim/run", json={"until": 1.0}).json()
    assert body["done"] is False
    assert all(e["time"] <= 1.0 for e in body["events"])


def test_events_stream_replays_trace_in_order(client):
    client.post("/sim/init", json={})
    trace = client.post("/sim/run", json={}).json()["events"]
    with client.stream("GET", "/events", params={"limit": len(trace)}) as response:
        streamed = _sse_events(response.iter_lines(), len(trace))
    assert streamed == trace


def test_events_stream_live(education_app):
    reader = TestClient(education_app)
    driver = TestClient(education_app)
    driver.post("/sim/init", json={})

    collected = []

    def read():
        with reader.stream("GET", "/events", params={"limit": 34}) as response:
            collected.extend(_sse_events(response.iter_lines(), 34))

    thread = threading.Thread(target=read)
    thread.start()
    time.sleep(0.05)
    trace = driver.post("/sim/run", json={}).json()["events"]
    thread.join(timeout=10)
    assert not thread.is_alive()
    assert collected == trace


def test_inject_endpoint(client, education):
    client.post("/sim/init", json={})
    client.post("/sim/run", json={"until": 1.0})
    response = client.post(
        "/sim/inject",
        json={"event": {"kind": "token_entered", "node": education.distribution,
                        "identity": education.evaluation}},
    )
    assert response.status_code == 200
    body = client.post("/sim/run", json={}).json()
    assert body["done"] is True


def test_inject_unknown_node_404(client, education):
    client.post("/sim/init", json={})
    response = client.post(
        "/sim/inject",
        json={"event": {"kind": "token_entered", "node": 999999,
                        "identity": education.evaluation}},
    )
    assert response.status_code == 404


def test_edits_rejected_while_running(client):
    client.post("/sim/init", json={})
    client.post("/sim/step")  # pending events remain
    response = client.post("/model/elements", json={"type": "node", "name": "late"})
    assert response.status_code == 409
    assert client.delete("/model/elements/1").status_code == 409
    client.post("/sim/run", json={})  # drain
    response = client.post("/model/elements", json={"type": "node", "name": "fine"})
    assert response.status_code == 200


def test_edit_roundtrip_with_relint(client):
    created = client.post("/model/elements", json={"type": "node", "name": "Island"})
    node_id = created.json()["id"]
    circle = client.post(
        "/model/elements", json={"type": "circle", "owner": node_id, "name": "beach"}
    )
    assert circle.status_code == 200
    response = client.delete(f"/model/elements/{node_id}")
    assert response.status_code == 200
    assert "findings" in response.json()
    doc = client.get("/model").json()
    assert all(n["id"] != node_id for n in doc["nodes"])


def test_delete_unknown_404(client):
    assert client.delete("/model/elements/987654").status_code == 404


def test_invalid_payloads_400(client):
    assert client.post("/model/elements", json={"type": "node", "name": ""}).status_code == 400
    assert client.post("/model/elements", json={"type": "wormhole"}).status_code == 400
    assert client.post("/model/elements", json={"type": "circle"}).status_code == 400


def test_edits_drive_view(client):
    node = client.post("/model/elements", json={"type": "node", "name": "Depot"}).json()["id"]
    client.post("/model/elements", json={"type": "circle", "owner": node, "name": "bay"})
    doc = client.get("/view", params={"kind": "object"}).json()
    assert any(e["name"] == "Depot" for e in doc["elements"])
    assert any(e["name"] == "bay" for e in doc["elements"])
