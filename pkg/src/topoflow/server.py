"""HTTP/JSON API plus a server-sent event stream of trace events.

One model per server. Requests serialize onto a single lock, so no two
mutations interleave; the event stream delivers every trace event in (time,
sequence) order. Structural edits are rejected with 409 while a simulation
still has pending events.
"""

from __future__ import annotations

import copy
import json
import queue
import threading

from fastapi import Body, FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response, StreamingResponse

from . import kernel, services
from .errors import ModelError, ServiceError, SimulationError, TopoflowError
from .export import to_dot, to_view_json
from .kernel import SimConfig, SimState, init_sim
from .lint import lint
from .model import (
    DotKind,
    Instruction,
    Model,
    RelationKind,
    add_circle,
    add_node,
    add_relation,
    connect_arc,
    delete_element,
    insert_dot,
    instantiate_association,
    place_star,
)
from .topology import project


class _State:
    def __init__(self, model: Model):
        self.authored = model
        self.sim: SimState | None = None
        self.lock = threading.RLock()
        self.streams: list[queue.Queue] = []

    def live_model(self) -> Model:
        return self.sim.model if self.sim is not None else self.authored

    def running(self) -> bool:
        return self.sim is not None and self.sim.pending() > 0

    def fan_out(self, event) -> None:
        payload = event.to_json()
        for stream in self.streams:
            stream.put(payload)


def _model_json(model: Model) -> dict:
    return {
        "version": "1.0",
        "next_id": model.next_id,
        "nodes": [
            {
                "id": n.id, "name": n.name,
                "dot_kind": n.dot_kind.value if n.dot_kind else None,
                "attributes": dict(sorted(n.attributes.items())),
                "circles": list(n.circles),
            }
            for _, n in sorted(model.nodes.items())
        ],
        "circles": [
            {"id": c.id, "owner": c.owner, "name": c.name, "stars": list(c.stars)}
            for _, c in sorted(model.circles.items())
        ],
        "stars": [
            {"id": s.id, "identity": s.identity, "circle": s.circle}
            for _, s in sorted(model.stars.items())
        ],
        "arcs": [
            {"id": a.id, "from": a.src, "to": a.dst, "dots": list(a.dots)}
            for _, a in sorted(model.arcs.items())
        ],
        "relations": [
            {
                "id": r.id, "kind": r.kind.value, "a": r.a, "b": r.b,
                "root": r.root_flag, "parent": r.parent,
                "multiplicity": r.multiplicity,
            }
            for _, r in sorted(model.relations.items())
        ],
        "services": [
            {
                "id": s.id, "pilot": s.pilot, "target": s.target,
                "instructions": [
                    {k: v for k, v in (
                        ("op", i.op), ("ref", i.ref), ("text", i.text),
                        ("amount", i.amount),
                    ) if v is not None}
                    for i in s.instructions
                ],
            }
            for _, s in sorted(model.services.items())
        ],
    }


def _findings_json(model: Model) -> list[dict]:
    return [json.loads(f.to_json()) for f in lint(model)]


def _create_element(model: Model, payload: dict) -> int | None:
    kind = payload.get("type")
    if kind == "node":
        dot_kind = payload.get("dot_kind")
        node_id = add_node(
            model, payload.get("name", ""),
            dot_kind=DotKind(dot_kind) if dot_kind else None,
        )
        for key, value in (payload.get("attributes") or {}).items():
            model.nodes[node_id].attributes[str(key)] = str(value)
        return node_id
    if kind == "circle":
        return add_circle(model, payload["owner"], payload.get("name", ""))
    if kind == "star":
        return place_star(model, payload["identity"], payload["circle"])
    if kind == "arc":
        return connect_arc(model, payload["from"], payload["to"])
    if kind == "dot":
        insert_dot(model, payload["arc"], payload["node"], payload.get("position"))
        return payload["node"]
    if kind == "relation":
        return add_relation(
            model, RelationKind(payload["kind"]), payload["a"], payload["b"],
            root_flag=bool(payload.get("root", False)),
            multiplicity=payload.get("multiplicity"),
        )
    if kind == "instance_link":
        return instantiate_association(
            model, payload["association"], payload["star_a"], payload["star_b"]
        )
    if kind == "service":
        instructions = [
            Instruction(
                op=i["op"], ref=i.get("ref"), text=i.get("text"),
                amount=i.get("amount"),
            )
            for i in payload.get("instructions", [])
        ]
        return services.bind_service(
            model, payload["pilot"], payload["target"], instructions
        )
    raise ModelError(f"unknown element type {kind!r}")


def create_app(model: Model) -> FastAPI:
    app = FastAPI(title="topoflow", version="0.1.0")
    # single-user local tool; the studio may be served from any static host
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )
    state = _State(model)
    app.state.topoflow = state

    @app.get("/model")
    def get_model():
        with state.lock:
            return _model_json(state.live_model())

    @app.get("/view")
    def get_view(
        kind: str = Query("merged"),
        filter: list[str] = Query(default=[]),
        show_stars: bool = Query(False),
        highlight: list[int] = Query(default=[]),
    ):
        with state.lock:
            live = state.live_model()
            try:
                view = project(
                    live, kind, filters=filter or None,
                    show_stars=show_stars, highlight=set(highlight),
                )
            except ValueError:
                raise HTTPException(400, f"unknown view kind {kind!r}") from None
            return Response(to_view_json(live, view), media_type="application/json")

    @app.get("/view.dot")
    def get_view_dot(
        kind: str = Query("merged"),
        filter: list[str] = Query(default=[]),
        show_stars: bool = Query(False),
        highlight: list[int] = Query(default=[]),
    ):
        with state.lock:
            live = state.live_model()
            view = project(
                live, kind, filters=filter or None,
                show_stars=show_stars, highlight=set(highlight),
            )
            return Response(to_dot(live, view), media_type="text/vnd.graphviz")

    @app.get("/lint")
    def get_lint():
        with state.lock:
            return {"findings": _findings_json(state.live_model())}

    @app.get("/sim")
    def sim_status():
        with state.lock:
            if state.sim is None:
                return {"initialized": False}
            return {
                "initialized": True,
                "clock": state.sim.clock,
                "pending": state.sim.pending(),
                "events": len(state.sim.trace),
                "running": state.running(),
            }

    @app.post("/sim/init")
    def sim_init(payload: dict = Body(default={})):
        with state.lock:
            config = SimConfig(
                mode=payload.get("mode", "simulated"),
                default_dwell=float(payload.get("default_dwell", 1.0)),
                seed=int(payload.get("seed", 0)),
                max_events=int(payload.get("max_events", 100_000)),
            )
            try:
                sim = init_sim(
                    copy.deepcopy(state.authored), config,
                    monitor=bool(payload.get("monitor", False)),
                )
            except TopoflowError as exc:
                raise HTTPException(400, str(exc)) from None
            state.sim = sim
            kernel.subscribe(sim, state.fan_out)
            return {"pending": sim.pending(), "clock": sim.clock}

    def _require_sim() -> SimState:
        if state.sim is None:
            raise HTTPException(400, "simulation not initialized; POST /sim/init first")
        return state.sim

    @app.post("/sim/step")
    def sim_step():
        with state.lock:
            sim = _require_sim()
            try:
                batch = kernel.step(sim)
            except TopoflowError as exc:
                raise HTTPException(400, str(exc)) from None
            events = [json.loads(e.to_json()) for e in (batch or [])]
            return {"events": events, "done": sim.pending() == 0}

    @app.post("/sim/run")
    def sim_run(payload: dict = Body(default={})):
        with state.lock:
            sim = _require_sim()
            mark = len(sim.trace)
            until = payload.get("until")
            try:
                kernel.run(sim, until_time=float(until) if until is not None else None)
            except TopoflowError as exc:
                raise HTTPException(400, str(exc)) from None
            events = [json.loads(e.to_json()) for e in sim.trace[mark:]]
            return {"events": events, "done": sim.pending() == 0}

    @app.post("/sim/inject")
    def sim_inject(payload: dict = Body(...)):
        with state.lock:
            sim = _require_sim()
            event = payload.get("event", payload)
            at_time = payload.get("at_time")
            try:
                kernel.inject(
                    sim, event, at_time=float(at_time) if at_time is not None else None
                )
            except ModelError as exc:
                raise HTTPException(404, str(exc)) from None
            except SimulationError as exc:
                raise HTTPException(400, str(exc)) from None
            return {"pending": sim.pending()}

    @app.get("/events")
    def events(request: Request, after: int = Query(-1), limit: int | None = Query(None)):
        with state.lock:
            subscriber: queue.Queue = queue.Queue()
            state.streams.append(subscriber)
            backlog = [e.to_json() for e in (state.sim.trace if state.sim else [])]

        def generate():
            sent = 0
            try:
                for payload in backlog:
                    if json.loads(payload)["seq"] <= after:
                        continue
                    yield f"data: {payload}\n\n"
                    sent += 1
                    if limit is not None and sent >= limit:
                        return
                while limit is None or sent < limit:
                    try:
                        payload = subscriber.get(timeout=5.0)
                    except queue.Empty:
                        yield ": keep-alive\n\n"
                        continue
                    yield f"data: {payload}\n\n"
                    sent += 1
            finally:
                with state.lock:
                    if subscriber in state.streams:
                        state.streams.remove(subscriber)

        return StreamingResponse(generate(), media_type="text/event-stream")

    @app.post("/model/elements")
    def add_element(payload: dict = Body(...)):
        with state.lock:
            if state.running():
                raise HTTPException(409, "simulation in progress; edits rejected")
            try:
                element_id = _create_element(state.authored, payload)
            except (KeyError, ValueError, TypeError) as exc:
                raise HTTPException(400, f"invalid payload: {exc!r}") from None
            except (ModelError, ServiceError) as exc:
                raise HTTPException(400, str(exc)) from None
            return {"id": element_id, "findings": _findings_json(state.authored)}

    @app.delete("/model/elements/{element_id}")
    def remove_element(element_id: int):
        with state.lock:
            if state.running():
                raise HTTPException(409, "simulation in progress; edits rejected")
            if state.authored.element_kind(element_id) is None:
                raise HTTPException(404, f"unknown element {element_id}")
            delete_element(state.authored, element_id)
            return {"findings": _findings_json(state.authored)}

    return app
