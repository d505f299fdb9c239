"""Event-driven token simulation.

The kernel owns a single logical event loop: a priority queue keyed by
(time, enqueue sequence). Exactly one queued action executes per step; its
effects are appended to the trace and delivered to listeners in order. Given
the same model, config and injected stream, two runs produce byte-identical
traces.

Transition semantics over an arc, from a source circle to the target node's
place circle:

* plain arc (or label dots only): the source star is removed and a star is
  created in the target place; the identity's star count is unchanged.
* rounded (duplicate) dots: the source star is retained; each duplicate dot
  beyond the first deposits an extra star in its own place circle; one star
  is created in the target place. Net star count rises by the dot count.
* gate (always last): the token's life ends at the gate; no star reaches the
  target. Without duplicate dots the source star is destroyed.
"""

from __future__ import annotations

import heapq
import json
import time as _time
from dataclasses import dataclass, field
from typing import Callable

from . import services as _services
from .errors import ModelError, SimulationError, TruncationError
from .model import (
    DotKind,
    Model,
    RelationKind,
    add_circle,
    check_integrity,
    delete_element,
    place_star,
    star_of,
)
from .topology import process_of, resolve_flows

PLACE_CIRCLE_NAME = "place"

EVENT_KINDS = (
    "token_created",
    "token_entered",
    "token_left",
    "star_created",
    "star_destroyed",
    "link_created",
    "service_executed",
    "token_finished",
    "service_fault",
    "tag_emitted",
    "warning",
)

# stable field order for the JSONL log
_SUBJECT_ORDER = (
    "token", "identity", "node", "circle", "star", "arc",
    "relation", "parent", "a", "b", "service", "pilot", "detail",
)


@dataclass(frozen=True)
class TraceEvent:
    time: float
    seq: int
    kind: str
    subjects: dict

    def to_json(self) -> str:
        record: dict = {"time": self.time, "seq": self.seq, "kind": self.kind}
        for key in _SUBJECT_ORDER:
            if key in self.subjects:
                record[key] = self.subjects[key]
        return json.dumps(record, separators=(",", ":"))


class Trace(list):
    """Append-only event log."""

    def to_jsonl(self) -> str:
        return "".join(event.to_json() + "\n" for event in self)

    @classmethod
    def from_jsonl(cls, text: str) -> "Trace":
        trace = cls()
        for line in text.splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            subjects = {
                k: v for k, v in record.items() if k not in ("time", "seq", "kind")
            }
            trace.append(
                TraceEvent(
                    time=record["time"], seq=record["seq"], kind=record["kind"],
                    subjects=subjects,
                )
            )
        return trace


@dataclass
class SimConfig:
    mode: str = "simulated"          # or "realtime"
    time_unit: float = 1.0           # wall seconds per clock unit in realtime
    default_dwell: float = 1.0
    seed: int = 0
    max_events: int = 100_000

    def __post_init__(self):
        if self.mode not in ("simulated", "realtime"):
            raise SimulationError(f"unknown mode {self.mode!r}")
        if self.max_events <= 0:
            raise SimulationError("max_events must be positive")
        if self.default_dwell < 0:
            raise SimulationError("default_dwell must be non-negative")


@dataclass
class Token:
    id: int
    identity: int
    current_star: int | None
    home_process: int | None
    finished: bool = False


@dataclass(order=True)
class _Queued:
    time: float
    seq: int
    action: tuple = field(compare=False)


class SimState:
    def __init__(self, model: Model, config: SimConfig, monitor: bool = False):
        self.model = model
        self.config = config
        self.monitor = monitor
        self.clock: float = 0.0
        self.trace = Trace()
        self.tokens: dict[int, Token] = {}
        self.entry_bindings: list[tuple[int, int]] = []  # (circle, arc)
        self._queue: list[_Queued] = []
        self._enqueue_seq = 0
        self._event_seq = 0
        self._executed = 0
        self._listeners: dict[int, Callable[[TraceEvent], None]] = {}
        self._next_subscription = 1
        self._next_token = 1
        self._wall_start = _time.monotonic()

    # -- event plumbing ----------------------------------------------------

    def pending(self) -> int:
        return len(self._queue)

    def peek_time(self) -> float | None:
        return self._queue[0].time if self._queue else None

    def schedule(self, at_time: float, action: tuple) -> None:
        if at_time < self.clock:
            raise SimulationError(
                f"cannot schedule at {at_time} before clock {self.clock}"
            )
        heapq.heappush(self._queue, _Queued(at_time, self._enqueue_seq, action))
        self._enqueue_seq += 1

    def emit(self, kind: str, **subjects) -> TraceEvent:
        event = TraceEvent(
            time=self.clock, seq=self._event_seq, kind=kind, subjects=subjects
        )
        self._event_seq += 1
        self.trace.append(event)
        for sub_id in sorted(self._listeners):
            self._listeners[sub_id](event)
        return event

    def wall_clock(self) -> float:
        return (_time.monotonic() - self._wall_start) / self.config.time_unit

    # -- model helpers -----------------------------------------------------

    def place_circle(self, node_id: int) -> int:
        node = self.model.nodes[node_id]
        for circle_id in node.circles:
            if self.model.circles[circle_id].name == PLACE_CIRCLE_NAME:
                return circle_id
        return add_circle(self.model, node_id, PLACE_CIRCLE_NAME)

    def current_node(self, token: Token) -> int | None:
        if token.current_star is None:
            return None
        star = self.model.stars[token.current_star]
        return self.model.circles[star.circle].owner

    def new_token(self, identity: int, home_process: int | None) -> Token:
        token = Token(
            id=self._next_token, identity=identity,
            current_star=None, home_process=home_process,
        )
        self._next_token += 1
        self.tokens[token.id] = token
        return token

    def schedule_fire(self, token: Token, arc_id: int, dwell: float) -> None:
        if self.monitor:
            return
        self.schedule(self.clock + dwell, ("fire", token.id, arc_id))


def init_sim(model: Model, config: SimConfig | None = None, monitor: bool = False) -> SimState:
    """Validate the model and schedule one entry per identity in a bound circle.

    In monitor mode nothing is scheduled: the simulation only moves when
    token movements are injected from outside.
    """
    config = config or SimConfig()
    problems = check_integrity(model)
    if problems:
        raise SimulationError("model failed integrity check: " + "; ".join(problems))
    flows = resolve_flows(model)  # raises FlowConflictError on ambiguity

    sim = SimState(model, config, monitor=monitor)
    for rel_id in sorted(model.relations):
        rel = model.relations[rel_id]
        if rel.kind != RelationKind.FLOW_BINDING:
            continue
        circle_id, arc_id = rel.a, rel.b
        sim.entry_bindings.append((circle_id, arc_id))
        if monitor:
            continue
        for star_id in model.circles[circle_id].stars:
            identity = model.stars[star_id].identity
            sim.schedule(0.0, ("entry", identity, circle_id, arc_id))
    del flows
    return sim


# ---------------------------------------------------------------------------
# transitions

def _cross(sim: SimState, token: Token, arc_id: int, source_circle: int) -> None:
    """Move, duplicate or destroy per the arc's dots; see the module docstring."""
    model = sim.model
    arc = model.arcs[arc_id]
    source = model.circles[source_circle]
    sim.emit("token_left", token=token.id, node=source.owner, circle=source.id)

    duplicates = [d for d in arc.dots if model.nodes[d].dot_kind == DotKind.DUPLICATE]
    gate = next(
        (d for d in arc.dots if model.nodes[d].dot_kind == DotKind.GATE), None
    )
    source_star = star_of(model, token.identity, source_circle)
    if source_star is None:
        raise SimulationError(
            f"token {token.id} has no star in circle {source_circle}"
        )

    if not duplicates and gate is None:
        _destroy_star(sim, source_star)
    for dot_id in duplicates[1:]:
        _create_star(sim, token.identity, sim.place_circle(dot_id))

    if gate is not None:
        if not duplicates:
            _destroy_star(sim, source_star)
        token.finished = True
        token.current_star = None
        sim.emit("token_finished", token=token.id, node=gate)
        return

    token.current_star = _create_star(
        sim, token.identity, sim.place_circle(arc.dst)
    )
    sim.emit("token_entered", token=token.id, node=arc.dst)
    _services.execute(sim, arc.dst, token)


def _create_star(sim: SimState, identity: int, circle_id: int) -> int:
    existing = star_of(sim.model, identity, circle_id)
    if existing is not None:
        sim.emit(
            "warning",
            circle=circle_id,
            detail=f"identity {identity} already placed in circle {circle_id}",
        )
        return existing
    star_id = place_star(sim.model, identity, circle_id)
    sim.emit("star_created", identity=identity, circle=circle_id, star=star_id)
    return star_id


def _destroy_star(sim: SimState, star_id: int) -> None:
    star = sim.model.stars[star_id]
    sim.emit(
        "star_destroyed", identity=star.identity, circle=star.circle, star=star_id
    )
    delete_element(sim.model, star_id)


def fire(sim: SimState, token_id: int, arc_id: int) -> list[TraceEvent]:
    """Send a token over an arc; returns the events the crossing produced."""
    token = sim.tokens.get(token_id)
    if token is None:
        raise SimulationError(f"unknown token {token_id}")
    if token.finished:
        raise SimulationError(f"token {token_id} is finished")
    arc = sim.model.arcs.get(arc_id)
    if arc is None:
        raise ModelError(f"unknown arc {arc_id}")
    if token.current_star is None:
        raise SimulationError(f"token {token_id} has no current star")
    star = sim.model.stars[token.current_star]
    source_circle = star.circle
    owner = sim.model.circles[source_circle].owner
    bound = any(
        rel.kind == RelationKind.FLOW_BINDING and rel.a == source_circle and rel.b == arc_id
        for rel in sim.model.relations.values()
    )
    if owner != arc.src and not bound:
        raise SimulationError(
            f"token {token_id} is at node {owner}, not at arc {arc_id} tail {arc.src}"
        )
    mark = len(sim.trace)
    _cross(sim, token, arc_id, source_circle)
    return list(sim.trace[mark:])


def _do_entry(sim: SimState, identity: int, circle_id: int, arc_id: int) -> None:
    if circle_id not in sim.model.circles or arc_id not in sim.model.arcs:
        raise SimulationError(
            f"entry references missing circle {circle_id} or arc {arc_id}"
        )
    arc = sim.model.arcs[arc_id]
    proc = process_of(sim.model, arc.dst)
    token = sim.new_token(identity, proc.id if proc else None)
    sim.emit(
        "token_created",
        token=token.id, identity=identity, circle=circle_id, arc=arc_id,
    )
    token.current_star = star_of(sim.model, identity, circle_id)
    if token.current_star is None:
        raise SimulationError(
            f"identity {identity} is no longer in bound circle {circle_id}"
        )
    _cross(sim, token, arc_id, circle_id)


# ---------------------------------------------------------------------------
# the loop

def step(sim: SimState) -> list[TraceEvent] | None:
    """Execute exactly one queued action; None when the queue is empty."""
    if not sim._queue:
        return None
    if sim._executed >= sim.config.max_events:
        raise TruncationError(
            f"event budget of {sim.config.max_events} exhausted", sim.trace
        )
    queued = heapq.heappop(sim._queue)
    sim._executed += 1
    sim.clock = max(sim.clock, queued.time)
    mark = len(sim.trace)
    action = queued.action
    if action[0] == "entry":
        _do_entry(sim, *action[1:])
    elif action[0] == "fire":
        token_id, arc_id = action[1:]
        token = sim.tokens[token_id]
        # an injected movement may have overtaken this hop; stale plans are dropped
        if not token.finished and _still_at_tail(sim, token, arc_id):
            star = sim.model.stars[token.current_star]
            _cross(sim, token, arc_id, star.circle)
    elif action[0] == "injected":
        _apply_injection(sim, action[1])
    else:  # pragma: no cover - queue is package-internal
        raise SimulationError(f"unknown action {action[0]!r}")
    return list(sim.trace[mark:])


def _still_at_tail(sim: SimState, token: Token, arc_id: int) -> bool:
    if token.current_star is None:
        return False
    arc = sim.model.arcs.get(arc_id)
    if arc is None:
        return False
    star = sim.model.stars[token.current_star]
    if sim.model.circles[star.circle].owner == arc.src:
        return True
    return any(
        rel.kind == RelationKind.FLOW_BINDING and rel.a == star.circle and rel.b == arc_id
        for rel in sim.model.relations.values()
    )


def run(sim: SimState, until_time: float | None = None) -> Trace:
    """Step until the queue drains, until_time passes, or the budget trips."""
    while sim._queue:
        next_time = sim._queue[0].time
        if until_time is not None and next_time > until_time:
            break
        if sim.config.mode == "realtime":
            delay = (next_time - sim.clock) * sim.config.time_unit
            if delay > 0:
                _time.sleep(delay)
        step(sim)
    return sim.trace


# ---------------------------------------------------------------------------
# outside world

def inject(sim: SimState, event: dict, at_time: float | None = None) -> None:
    """Enqueue an externally observed event (monitoring or steering).

    Supported kinds: token_entered with a target node plus a token or
    identity. In simulated mode the event time defaults to the current clock
    and may not lie in the past; in realtime mode the wall clock decides.
    """
    kind = event.get("kind")
    if kind != "token_entered":
        raise SimulationError(f"cannot inject events of kind {kind!r}")
    node_id = event.get("node")
    if node_id not in sim.model.nodes:
        raise ModelError(f"injected event references missing node {node_id}")
    if "token" in event and event["token"] not in sim.tokens:
        raise SimulationError(f"injected event references unknown token {event['token']}")
    if "identity" in event and event["identity"] not in sim.model.nodes:
        raise ModelError(
            f"injected event references missing identity {event['identity']}"
        )
    if "token" not in event and "identity" not in event:
        raise SimulationError("injected token_entered needs a token or identity")

    if sim.config.mode == "realtime":
        stamp = max(sim.wall_clock(), sim.clock)
    else:
        stamp = sim.clock if at_time is None else at_time
        if stamp < sim.clock:
            raise SimulationError(
                f"injected time {stamp} lies in the past (clock {sim.clock})"
            )
    sim.schedule(stamp, ("injected", dict(event)))


def _apply_injection(sim: SimState, event: dict) -> None:
    node_id = event["node"]
    token = None
    if "token" in event:
        token = sim.tokens.get(event["token"])
        if token is None:
            raise SimulationError(f"unknown token {event['token']}")
    else:
        identity = event["identity"]
        alive = [
            t for t in sorted(sim.tokens.values(), key=lambda t: t.id)
            if t.identity == identity and not t.finished
        ]
        for candidate in alive:
            if _arc_between(sim, candidate, node_id) is not None:
                token = candidate
                break
        if token is None and not alive:
            _entry_for(sim, identity, node_id)
            return
    if token is None:
        raise SimulationError(
            f"no alive token can reach node {node_id} for injected event"
        )
    arc_id = _arc_between(sim, token, node_id)
    if arc_id is None:
        raise SimulationError(
            f"token {token.id} has no arc to node {node_id}"
        )
    star = sim.model.stars[token.current_star]
    _cross(sim, token, arc_id, star.circle)


def _arc_between(sim: SimState, token: Token, node_id: int) -> int | None:
    if token.current_star is None:
        return None
    here = sim.current_node(token)
    star = sim.model.stars[token.current_star]
    for arc_id in sorted(sim.model.arcs):
        arc = sim.model.arcs[arc_id]
        if arc.dst != node_id:
            continue
        if arc.src == here:
            return arc_id
        # entry arcs reach the token while it still sits in the bound circle
        for rel in sim.model.relations.values():
            if (
                rel.kind == RelationKind.FLOW_BINDING
                and rel.b == arc_id
                and rel.a == star.circle
            ):
                return arc_id
    return None


def _entry_for(sim: SimState, identity: int, node_id: int) -> None:
    for circle_id, arc_id in sim.entry_bindings:
        if sim.model.arcs[arc_id].dst != node_id:
            continue
        if star_of(sim.model, identity, circle_id) is not None:
            _do_entry(sim, identity, circle_id, arc_id)
            return
    raise SimulationError(
        f"identity {identity} has no entry binding reaching node {node_id}"
    )


def subscribe(sim: SimState, listener: Callable[[TraceEvent], None]) -> int:
    sub_id = sim._next_subscription
    sim._next_subscription += 1
    sim._listeners[sub_id] = listener
    return sub_id


def unsubscribe(sim: SimState, subscription_id: int) -> None:
    sim._listeners.pop(subscription_id, None)
