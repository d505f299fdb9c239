"""Element graph: nodes, circles, stars, arcs, dots and relations.

Every element carries an integer id drawn from one model-wide counter, so ids
are unique across element kinds and never reused. A node's identity shares the
node's id; separating "the object" from "where it is placed" is the job of
stars, one per (identity, circle) pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import ModelError


class DotKind(str, Enum):
    DUPLICATE = "duplicate"
    LABEL = "label"
    GATE = "gate"


class RelationKind(str, Enum):
    ASSOCIATION = "association"
    PILOT = "pilot"
    FLOW_BINDING = "flow_binding"
    INSTANCE_LINK = "instance_link"


@dataclass
class Identity:
    id: int
    display_name: str


@dataclass
class Node:
    id: int
    name: str
    identity: Identity
    dot_kind: DotKind | None = None
    circles: list[int] = field(default_factory=list)
    attributes: dict[str, str] = field(default_factory=dict)


@dataclass
class Circle:
    id: int
    owner: int
    name: str
    stars: list[int] = field(default_factory=list)  # FIFO: append on placement


@dataclass
class Star:
    id: int
    identity: int
    circle: int


@dataclass
class Arc:
    id: int
    src: int
    dst: int
    dots: list[int] = field(default_factory=list)  # node ids; gate, if any, last


@dataclass
class Relation:
    id: int
    kind: RelationKind
    a: int
    b: int
    root_flag: bool = False
    parent: int | None = None       # instance_link: the association instantiated
    multiplicity: str | None = None


@dataclass
class Instruction:
    """One step of a pilot service.

    ops and their arguments:
      WAIT(amount)            extra dwell before the terminal hop
      LINK(ref=assoc, text=selector)   instance-link the token to matching members
      DUPLICATE_TO(ref=circle)         place a star for each selected identity
      PLACE_IN(ref=circle)             place a star for the token's identity
      EMIT(text=tag)                   emit a tagged trace event
      ROUTE(ref=arc)          terminal: leave over this arc
      FORWARD                 terminal: leave over the only (or lowest-id) arc
      DESTROY                 terminal: end the token's life here
    """

    op: str
    ref: int | None = None
    text: str | None = None
    amount: float | None = None


TERMINAL_OPS = ("FORWARD", "ROUTE", "DESTROY")
INSTRUCTION_OPS = ("WAIT", "LINK", "DUPLICATE_TO", "PLACE_IN", "EMIT") + TERMINAL_OPS


@dataclass
class Service:
    id: int
    pilot: int   # identity id
    target: int  # node id
    instructions: list[Instruction] = field(default_factory=list)


@dataclass
class Model:
    nodes: dict[int, Node] = field(default_factory=dict)
    circles: dict[int, Circle] = field(default_factory=dict)
    stars: dict[int, Star] = field(default_factory=dict)
    arcs: dict[int, Arc] = field(default_factory=dict)
    relations: dict[int, Relation] = field(default_factory=dict)
    services: dict[int, Service] = field(default_factory=dict)
    next_id: int = 1

    def fresh_id(self) -> int:
        allocated = self.next_id
        self.next_id += 1
        return allocated

    def element_kind(self, element_id: int) -> str | None:
        for kind, table in (
            ("node", self.nodes),
            ("circle", self.circles),
            ("star", self.stars),
            ("arc", self.arcs),
            ("relation", self.relations),
            ("service", self.services),
        ):
            if element_id in table:
                return kind
        return None


# ---------------------------------------------------------------------------
# lookups

def _node(model: Model, node_id: int) -> Node:
    try:
        return model.nodes[node_id]
    except KeyError:
        raise ModelError(f"unknown node {node_id}") from None


def _circle(model: Model, circle_id: int) -> Circle:
    try:
        return model.circles[circle_id]
    except KeyError:
        raise ModelError(f"unknown circle {circle_id}") from None


def _star(model: Model, star_id: int) -> Star:
    try:
        return model.stars[star_id]
    except KeyError:
        raise ModelError(f"unknown star {star_id}") from None


def _arc(model: Model, arc_id: int) -> Arc:
    try:
        return model.arcs[arc_id]
    except KeyError:
        raise ModelError(f"unknown arc {arc_id}") from None


def _relation(model: Model, relation_id: int) -> Relation:
    try:
        return model.relations[relation_id]
    except KeyError:
        raise ModelError(f"unknown relation {relation_id}") from None


# ---------------------------------------------------------------------------
# structural mutation

def add_node(model: Model, name: str, dot_kind: DotKind | None = None) -> int:
    """Create a node and its identity. Dots are ordinary nodes with dot_kind set."""
    if not name:
        raise ModelError("node name must be non-empty")
    node_id = model.fresh_id()
    model.nodes[node_id] = Node(
        id=node_id, name=name, identity=Identity(id=node_id, display_name=name),
        dot_kind=DotKind(dot_kind) if dot_kind is not None else None,
    )
    return node_id


def add_circle(model: Model, node_id: int, name: str) -> int:
    node = _node(model, node_id)
    if any(model.circles[c].name == name for c in node.circles):
        raise ModelError(f"node {node_id} already owns a circle named {name!r}")
    circle_id = model.fresh_id()
    model.circles[circle_id] = Circle(id=circle_id, owner=node_id, name=name)
    node.circles.append(circle_id)
    return circle_id


def place_star(model: Model, identity_id: int, circle_id: int) -> int:
    """Place an identity into a circle. At most one star per (identity, circle)."""
    _node(model, identity_id)  # identities share their node's id
    circle = _circle(model, circle_id)
    if any(model.stars[s].identity == identity_id for s in circle.stars):
        raise ModelError(
            f"identity {identity_id} is already placed in circle {circle_id}"
        )
    star_id = model.fresh_id()
    model.stars[star_id] = Star(id=star_id, identity=identity_id, circle=circle_id)
    circle.stars.append(star_id)
    return star_id


def connect_arc(model: Model, src: int, dst: int) -> int:
    _node(model, src)
    _node(model, dst)
    if src == dst:
        raise ModelError(f"arc may not loop node {src} onto itself")
    arc_id = model.fresh_id()
    model.arcs[arc_id] = Arc(id=arc_id, src=src, dst=dst)
    return arc_id


def insert_dot(model: Model, arc_id: int, dot_node_id: int, position: int | None = None) -> None:
    """Insert a dot node into an arc's dot list. A gate must stay last."""
    arc = _arc(model, arc_id)
    dot = _node(model, dot_node_id)
    if dot.dot_kind is None:
        raise ModelError(f"node {dot_node_id} is not a dot")
    for other in model.arcs.values():
        if dot_node_id in other.dots:
            raise ModelError(f"dot {dot_node_id} already sits on arc {other.id}")
    if position is None:
        position = len(arc.dots)
    if not 0 <= position <= len(arc.dots):
        raise ModelError(f"dot position {position} out of range for arc {arc_id}")
    gate_index = next(
        (i for i, d in enumerate(arc.dots) if model.nodes[d].dot_kind == DotKind.GATE),
        None,
    )
    if gate_index is not None:
        if dot.dot_kind == DotKind.GATE:
            raise ModelError(f"arc {arc_id} already carries a gate")
        if position > gate_index:
            raise ModelError(f"cannot insert a dot after the gate on arc {arc_id}")
    if dot.dot_kind == DotKind.GATE and position != len(arc.dots):
        raise ModelError("a gate must be the last dot on its arc")
    arc.dots.insert(position, dot_node_id)


def add_relation(
    model: Model,
    kind: RelationKind | str,
    a: int,
    b: int,
    root_flag: bool = False,
    multiplicity: str | None = None,
) -> int:
    """Add an association, pilot or flow-binding relation; endpoints are type-checked."""
    kind = RelationKind(kind)
    if kind == RelationKind.ASSOCIATION:
        _circle(model, a)
        _circle(model, b)
    elif kind == RelationKind.PILOT:
        _node(model, a)  # pilot endpoint a is an identity, i.e. a node id
        _node(model, b)
        if root_flag:
            for rel in model.relations.values():
                if rel.kind == RelationKind.PILOT and rel.root_flag and rel.b == b:
                    raise ModelError(f"node {b} already has a root pilot ({rel.a})")
    elif kind == RelationKind.FLOW_BINDING:
        circle = _circle(model, a)
        _arc(model, b)
        if model.nodes[circle.owner].dot_kind is not None:
            raise ModelError(
                f"circle {a} belongs to dot {circle.owner}; dots cannot source flows"
            )
    else:
        raise ModelError("instance links are created via instantiate_association")
    relation_id = model.fresh_id()
    model.relations[relation_id] = Relation(
        id=relation_id, kind=kind, a=a, b=b, root_flag=root_flag,
        multiplicity=multiplicity,
    )
    return relation_id


def instantiate_association(
    model: Model, association_id: int, star_a: int, star_b: int
) -> int:
    """Link two stars under a formal association between their circles."""
    assoc = _relation(model, association_id)
    if assoc.kind != RelationKind.ASSOCIATION:
        raise ModelError(f"relation {association_id} is not an association")
    sa, sb = _star(model, star_a), _star(model, star_b)
    if {sa.circle, sb.circle} != {assoc.a, assoc.b} and not (
        assoc.a == assoc.b and sa.circle == assoc.a and sb.circle == assoc.a
    ):
        raise ModelError(
            f"stars {star_a},{star_b} sit in circles {sa.circle},{sb.circle}, "
            f"not in the endpoints of association {association_id}"
        )
    # keep endpoint order aligned with the parent association
    if sa.circle != assoc.a:
        star_a, star_b = star_b, star_a
    relation_id = model.fresh_id()
    model.relations[relation_id] = Relation(
        id=relation_id, kind=RelationKind.INSTANCE_LINK,
        a=star_a, b=star_b, parent=association_id,
    )
    return relation_id


# ---------------------------------------------------------------------------
# queries

def members(model: Model, circle_id: int) -> list[Identity]:
    """Identities placed in a circle, in arrival (FIFO) order."""
    circle = _circle(model, circle_id)
    return [model.nodes[model.stars[s].identity].identity for s in circle.stars]


def placements(model: Model, identity_id: int) -> set[int]:
    """The set of circles an identity is placed in."""
    _node(model, identity_id)
    return {s.circle for s in model.stars.values() if s.identity == identity_id}


def star_of(model: Model, identity_id: int, circle_id: int) -> int | None:
    circle = _circle(model, circle_id)
    for star_id in circle.stars:
        if model.stars[star_id].identity == identity_id:
            return star_id
    return None


def arc_dot_kinds(model: Model, arc: Arc) -> list[DotKind]:
    return [model.nodes[d].dot_kind for d in arc.dots]


# ---------------------------------------------------------------------------
# deletion with cascades

def delete_element(model: Model, element_id: int) -> None:
    """Delete an element and everything that would dangle without it."""
    kind = model.element_kind(element_id)
    if kind is None:
        raise ModelError(f"unknown element {element_id}")
    getattr(_DELETERS, kind)(model, element_id)


def _delete_star(model: Model, star_id: int) -> None:
    star = model.stars.pop(star_id, None)
    if star is None:
        return
    circle = model.circles.get(star.circle)
    if circle is not None and star_id in circle.stars:
        circle.stars.remove(star_id)
    for rel_id in sorted(model.relations):
        rel = model.relations.get(rel_id)
        if rel and rel.kind == RelationKind.INSTANCE_LINK and star_id in (rel.a, rel.b):
            _delete_relation(model, rel_id)


def _delete_relation(model: Model, relation_id: int) -> None:
    rel = model.relations.pop(relation_id, None)
    if rel is None:
        return
    if rel.kind == RelationKind.ASSOCIATION:
        for child_id in sorted(model.relations):
            child = model.relations.get(child_id)
            if child and child.parent == relation_id:
                _delete_relation(model, child_id)


def _delete_circle(model: Model, circle_id: int) -> None:
    circle = model.circles.pop(circle_id, None)
    if circle is None:
        return
    owner = model.nodes.get(circle.owner)
    if owner is not None and circle_id in owner.circles:
        owner.circles.remove(circle_id)
    for star_id in list(circle.stars):
        _delete_star(model, star_id)
    for rel_id in sorted(model.relations):
        rel = model.relations.get(rel_id)
        if rel is None:
            continue
        if rel.kind in (RelationKind.ASSOCIATION, RelationKind.FLOW_BINDING) and circle_id in (rel.a, rel.b):
            _delete_relation(model, rel_id)


def _delete_arc(model: Model, arc_id: int) -> None:
    arc = model.arcs.pop(arc_id, None)
    if arc is None:
        return
    for rel_id in sorted(model.relations):
        rel = model.relations.get(rel_id)
        if rel and rel.kind == RelationKind.FLOW_BINDING and rel.b == arc_id:
            _delete_relation(model, rel_id)


def _delete_service(model: Model, service_id: int) -> None:
    model.services.pop(service_id, None)


def _delete_node(model: Model, node_id: int) -> None:
    node = model.nodes.pop(node_id, None)
    if node is None:
        return
    for circle_id in list(node.circles):
        _delete_circle(model, circle_id)
    for arc_id in sorted(model.arcs):
        arc = model.arcs.get(arc_id)
        if arc is None:
            continue
        if node_id in (arc.src, arc.dst):
            _delete_arc(model, arc_id)
        elif node_id in arc.dots:
            arc.dots.remove(node_id)
    # the node's identity dies with it: stars, links, pilot relations
    for star_id in sorted(model.stars):
        star = model.stars.get(star_id)
        if star and star.identity == node_id:
            _delete_star(model, star_id)
    for rel_id in sorted(model.relations):
        rel = model.relations.get(rel_id)
        if rel and rel.kind == RelationKind.PILOT and node_id in (rel.a, rel.b):
            _delete_relation(model, rel_id)
    for service_id in sorted(model.services):
        svc = model.services.get(service_id)
        if svc and node_id in (svc.pilot, svc.target):
            _delete_service(model, service_id)


class _DELETERS:
    node = staticmethod(_delete_node)
    circle = staticmethod(_delete_circle)
    star = staticmethod(_delete_star)
    arc = staticmethod(_delete_arc)
    relation = staticmethod(_delete_relation)
    service = staticmethod(_delete_service)


# ---------------------------------------------------------------------------
# integrity

def check_integrity(model: Model) -> list[str]:
    """Full referential-integrity scan; returns human-readable violations."""
    problems: list[str] = []
    for node in model.nodes.values():
        if node.identity.id != node.id:
            problems.append(f"node {node.id} identity id mismatch")
        for circle_id in node.circles:
            circle = model.circles.get(circle_id)
            if circle is None:
                problems.append(f"node {node.id} lists missing circle {circle_id}")
            elif circle.owner != node.id:
                problems.append(f"circle {circle_id} owner disagrees with node {node.id}")
    for circle in model.circles.values():
        if circle.owner not in model.nodes:
            problems.append(f"circle {circle.id} owned by missing node {circle.owner}")
        elif circle.id not in model.nodes[circle.owner].circles:
            problems.append(f"circle {circle.id} not listed by its owner {circle.owner}")
        seen_identities: set[int] = set()
        for star_id in circle.stars:
            star = model.stars.get(star_id)
            if star is None:
                problems.append(f"circle {circle.id} lists missing star {star_id}")
                continue
            if star.circle != circle.id:
                problems.append(f"star {star_id} disagrees with circle {circle.id}")
            if star.identity in seen_identities:
                problems.append(
                    f"identity {star.identity} placed twice in circle {circle.id}"
                )
            seen_identities.add(star.identity)
    for star in model.stars.values():
        if star.identity not in model.nodes:
            problems.append(f"star {star.id} of missing identity {star.identity}")
        circle = model.circles.get(star.circle)
        if circle is None:
            problems.append(f"star {star.id} in missing circle {star.circle}")
        elif star.id not in circle.stars:
            problems.append(f"star {star.id} not listed by circle {star.circle}")
    for arc in model.arcs.values():
        if arc.src not in model.nodes or arc.dst not in model.nodes:
            problems.append(f"arc {arc.id} touches a missing node")
        if arc.src == arc.dst:
            problems.append(f"arc {arc.id} is a self-loop")
        gates = 0
        for i, dot_id in enumerate(arc.dots):
            dot = model.nodes.get(dot_id)
            if dot is None or dot.dot_kind is None:
                problems.append(f"arc {arc.id} lists non-dot {dot_id}")
                continue
            if dot.dot_kind == DotKind.GATE:
                gates += 1
                if i != len(arc.dots) - 1:
                    problems.append(f"gate {dot_id} is not last on arc {arc.id}")
        if gates > 1:
            problems.append(f"arc {arc.id} carries {gates} gates")
    root_pilots: set[int] = set()
    for rel in model.relations.values():
        if rel.kind == RelationKind.ASSOCIATION:
            ok = rel.a in model.circles and rel.b in model.circles
        elif rel.kind == RelationKind.PILOT:
            ok = rel.a in model.nodes and rel.b in model.nodes
            if ok and rel.root_flag:
                if rel.b in root_pilots:
                    problems.append(f"node {rel.b} has multiple root pilots")
                root_pilots.add(rel.b)
        elif rel.kind == RelationKind.FLOW_BINDING:
            ok = rel.a in model.circles and rel.b in model.arcs
            if ok and model.nodes.get(model.circles[rel.a].owner, None) is not None:
                if model.nodes[model.circles[rel.a].owner].dot_kind is not None:
                    problems.append(f"flow binding {rel.id} sources from a dot's circle")
        else:
            ok = rel.a in model.stars and rel.b in model.stars
            parent = model.relations.get(rel.parent) if rel.parent else None
            if parent is None or parent.kind != RelationKind.ASSOCIATION:
                problems.append(f"instance link {rel.id} has no parent association")
            elif ok:
                circles = {model.stars[rel.a].circle, model.stars[rel.b].circle}
                if circles != {parent.a, parent.b}:
                    problems.append(
                        f"instance link {rel.id} endpoints stray from association {parent.id}"
                    )
        if not ok:
            problems.append(f"relation {rel.id} ({rel.kind.value}) has dangling endpoints")
    for svc in model.services.values():
        if svc.pilot not in model.nodes or svc.target not in model.nodes:
            problems.append(f"service {svc.id} references a missing node")
    return problems
