"""Shared builders: small canonical fixtures and seeded random model generators."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from topoflow import (
    DotKind,
    Model,
    RelationKind,
    add_circle,
    add_node,
    add_relation,
    bind_service,
    connect_arc,
    insert_dot,
    place_star,
)
from topoflow.services import forward, link


@dataclass
class BallsFixture:
    """A node with five color circles; blue holds two balls, green one."""

    model: Model = field(default_factory=Model)
    balls: int = 0
    circles: dict[str, int] = field(default_factory=dict)
    blue_1: int = 0
    blue_2: int = 0
    green_1: int = 0


def balls_model() -> BallsFixture:
    fx = BallsFixture()
    m = fx.model
    fx.balls = add_node(m, "Balls")
    for color in ("blue", "green", "red", "yellow", "white"):
        fx.circles[color] = add_circle(m, fx.balls, color)
    fx.blue_1 = add_node(m, "blue ball 1")
    fx.blue_2 = add_node(m, "blue ball 2")
    fx.green_1 = add_node(m, "green ball 1")
    place_star(m, fx.blue_1, fx.circles["blue"])
    place_star(m, fx.blue_2, fx.circles["blue"])
    place_star(m, fx.green_1, fx.circles["green"])
    return fx


@dataclass
class EnrollmentFixture:
    """Three-way transition semantics: plain move, duplication dot, gate."""

    model: Model = field(default_factory=Model)
    person_class: int = 0
    person_circle: int = 0
    student: int = 0
    pre_registration: int = 0
    registration: int = 0
    studying: int = 0
    association: int = 0
    end_of_study: int = 0
    entry_arc: int = 0
    plain_arc: int = 0
    dotted_arc: int = 0
    gate_arc: int = 0
    dot: int = 0
    gate: int = 0


def enrollment_model() -> EnrollmentFixture:
    """Pre-registration -> Registration -> Studying -> Student association,
    with a duplication dot before the association and a gated exit from
    Studying for the end of study."""
    fx = EnrollmentFixture()
    m = fx.model
    fx.person_class = add_node(m, "Person")
    m.nodes[fx.person_class].attributes["name"] = "text"
    fx.person_circle = add_circle(m, fx.person_class, "Person")
    fx.student = add_node(m, "John")
    place_star(m, fx.student, fx.person_circle)

    fx.pre_registration = add_node(m, "Pre-registration")
    fx.registration = add_node(m, "Registration")
    fx.studying = add_node(m, "Studying")
    fx.association = add_node(m, "Student association")
    fx.end_of_study = add_node(m, "End of study")

    fx.entry_arc = connect_arc(m, fx.pre_registration, fx.registration)
    fx.plain_arc = connect_arc(m, fx.registration, fx.studying)
    fx.dotted_arc = connect_arc(m, fx.studying, fx.association)
    fx.gate_arc = connect_arc(m, fx.studying, fx.end_of_study)

    fx.dot = add_node(m, "membership kept", dot_kind=DotKind.DUPLICATE)
    insert_dot(m, fx.dotted_arc, fx.dot)
    fx.gate = add_node(m, "end of life", dot_kind=DotKind.GATE)
    insert_dot(m, fx.gate_arc, fx.gate)

    add_relation(m, RelationKind.FLOW_BINDING, fx.person_circle, fx.entry_arc)
    return fx


# ---------------------------------------------------------------------------
# seeded random generators (plain random, not hypothesis: tight time budgets)

def random_process_model(rng: random.Random, max_stage_nodes: int = 8) -> Model:
    """A DAG process fed from class circles; shaped so that star bookkeeping
    is exact: one bound circle per identity, no parallel twin arcs."""
    m = Model()
    source_circles: list[int] = []
    for i in range(rng.randint(1, 2)):
        cls = add_node(m, f"class{i}")
        m.nodes[cls].attributes["kind"] = "text"
        circle = add_circle(m, cls, f"set{i}")
        for j in range(rng.randint(1, 3)):
            obj = add_node(m, f"obj{i}.{j}")
            place_star(m, obj, circle)
        source_circles.append(circle)

    n_stages = rng.randint(2, max_stage_nodes)
    stages = [add_node(m, f"stage{k}") for k in range(n_stages)]
    arc_pairs: set[tuple[int, int]] = set()
    arcs: list[int] = []
    for a, b in zip(stages, stages[1:]):
        arcs.append(connect_arc(m, a, b))
        arc_pairs.add((a, b))
    for _ in range(rng.randint(0, 2)):
        i = rng.randrange(0, n_stages - 1)
        j = rng.randrange(i + 1, n_stages)
        if (stages[i], stages[j]) not in arc_pairs:
            arcs.append(connect_arc(m, stages[i], stages[j]))
            arc_pairs.add((stages[i], stages[j]))

    for arc_id in list(arcs):
        roll = rng.random()
        if roll < 0.25:
            dot = add_node(m, f"dup{arc_id}", dot_kind=DotKind.DUPLICATE)
            insert_dot(m, arc_id, dot)
            if rng.random() < 0.3:
                extra = add_node(m, f"dup{arc_id}b", dot_kind=DotKind.DUPLICATE)
                insert_dot(m, arc_id, extra)
        elif roll < 0.35:
            gate = add_node(m, f"gate{arc_id}", dot_kind=DotKind.GATE)
            insert_dot(m, arc_id, gate)
        elif roll < 0.42:
            label = add_node(m, f"label{arc_id}", dot_kind=DotKind.LABEL)
            insert_dot(m, arc_id, label)

    # one binding per source circle, each onto a distinct arc
    available = list(arcs)
    rng.shuffle(available)
    for circle in source_circles:
        if not available:
            break
        add_relation(m, RelationKind.FLOW_BINDING, circle, available.pop())
    return m


def random_rich_model(rng: random.Random) -> Model:
    """Process model plus associations, pilots, services, links, attributes."""
    m = random_process_model(rng)
    class_circles = [
        c.id for c in m.circles.values() if m.nodes[c.owner].dot_kind is None
    ]
    assocs = []
    for _ in range(rng.randint(0, 3)):
        if len(class_circles) < 1:
            break
        a = rng.choice(class_circles)
        b = rng.choice(class_circles)
        multiplicity = rng.choice([None, "1", "0..*", "0..1"])
        assocs.append(
            add_relation(m, RelationKind.ASSOCIATION, a, b, multiplicity=multiplicity)
        )
    # instance links under a random association with stars in both endpoints
    for assoc_id in assocs:
        rel = m.relations[assoc_id]
        left = m.circles[rel.a].stars
        right = m.circles[rel.b].stars
        if left and right and rng.random() < 0.5:
            from topoflow import instantiate_association

            try:
                instantiate_association(m, assoc_id, left[0], right[0])
            except Exception:
                pass  # same-circle association with one star; skip
    stages = [
        n.id for n in m.nodes.values()
        if n.dot_kind is None and n.name.startswith("stage")
    ]
    if stages and rng.random() < 0.8:
        pilot = add_node(m, "pilot")
        target = stages[0]
        add_relation(m, RelationKind.PILOT, pilot, target, root_flag=True)
        instructions = [forward()]
        if assocs and rng.random() < 0.5:
            rel = m.relations[assocs[0]]
            if m.circles[rel.a].stars and m.circles[rel.b].stars:
                instructions = [link(assocs[0], "*"), forward()]
        bind_service(m, pilot, target, instructions)
    return m


def random_flat_dag(rng: random.Random, max_nodes: int = 8) -> Model:
    """Arbitrary DAG topology for classification checks: plain nodes, dots,
    isolated circles and associations."""
    m = Model()
    count = rng.randint(0, max_nodes)
    nodes = []
    for i in range(count):
        kind = rng.choice([None, None, None, DotKind.DUPLICATE, DotKind.LABEL, DotKind.GATE])
        nodes.append(add_node(m, f"n{i}", dot_kind=kind))
    for i in range(count):
        for j in range(i + 1, count):
            if rng.random() < 0.2:
                connect_arc(m, nodes[i], nodes[j])
    circles = []
    for node_id in nodes:
        if rng.random() < 0.3:
            circles.append(add_circle(m, node_id, f"c{node_id}"))
    for _ in range(rng.randint(0, 2)):
        if len(circles) >= 2:
            a, b = rng.sample(circles, 2)
            add_relation(m, RelationKind.ASSOCIATION, a, b)
    return m
