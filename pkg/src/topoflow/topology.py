"""Meaning from shape: node classification, process detection and view projection.

Nothing here mutates the model; every function is a pure read of a snapshot.
Node kinds are never stored — they are recomputed from arc incidence each call,
so any structural edit is reflected by the next classification.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fnmatch import fnmatchcase

from .errors import FlowConflictError
from .model import Model, RelationKind, _node


class NodeKind(str, Enum):
    START = "start"
    FINAL = "final"
    ACTIVITY = "activity"
    DOT = "dot"
    OBJECT = "object"
    CLASS = "class"


class ViewKind(str, Enum):
    OBJECT = "object"
    PROCESS = "process"
    MERGED = "merged"


@dataclass
class Classification:
    kinds: dict[int, NodeKind] = field(default_factory=dict)
    in_process: dict[int, int] = field(default_factory=dict)


@dataclass
class ProcessGraph:
    id: int                      # smallest member node id, stable across reads
    nodes: list[int] = field(default_factory=list)
    arcs: list[int] = field(default_factory=list)
    start_nodes: list[int] = field(default_factory=list)
    final_nodes: list[int] = field(default_factory=list)
    root_pilot: int | None = None  # identity id


@dataclass
class ViewModel:
    view_kind: ViewKind
    visible: set[int] = field(default_factory=set)
    show_stars: bool = False
    highlight: set[int] = field(default_factory=set)


def classify(model: Model) -> Classification:
    """Assign each node a kind from its topology alone."""
    outgoing: dict[int, int] = {}
    incoming: dict[int, int] = {}
    for arc in model.arcs.values():
        outgoing[arc.src] = outgoing.get(arc.src, 0) + 1
        incoming[arc.dst] = incoming.get(arc.dst, 0) + 1

    association_circles = {
        end
        for rel in model.relations.values()
        if rel.kind == RelationKind.ASSOCIATION
        for end in (rel.a, rel.b)
    }

    result = Classification()
    for node in model.nodes.values():
        if node.dot_kind is not None:
            kind = NodeKind.DOT
        else:
            has_out = outgoing.get(node.id, 0) > 0
            has_in = incoming.get(node.id, 0) > 0
            if has_out and has_in:
                kind = NodeKind.ACTIVITY
            elif has_out:
                kind = NodeKind.START
            elif has_in:
                kind = NodeKind.FINAL
            elif any(c in association_circles for c in node.circles):
                kind = NodeKind.CLASS
            else:
                kind = NodeKind.OBJECT
        result.kinds[node.id] = kind

    for proc in processes(model):
        for node_id in proc.nodes:
            result.in_process[node_id] = proc.id
    return result


def processes(model: Model) -> list[ProcessGraph]:
    """Partition arc-bearing nodes into weakly-connected components."""
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        parent.setdefault(x, x)
        parent.setdefault(y, y)
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    for arc in model.arcs.values():
        union(arc.src, arc.dst)

    groups: dict[int, ProcessGraph] = {}
    for node_id in sorted(parent):
        root = find(node_id)
        group = groups.get(root)
        if group is None:
            group = groups[root] = ProcessGraph(id=root)
        group.nodes.append(node_id)

    outgoing: dict[int, int] = {}
    incoming: dict[int, int] = {}
    for arc_id in sorted(model.arcs):
        arc = model.arcs[arc_id]
        group = groups[find(arc.src)]
        group.arcs.append(arc_id)
        outgoing[arc.src] = outgoing.get(arc.src, 0) + 1
        incoming[arc.dst] = incoming.get(arc.dst, 0) + 1
        for dot_id in arc.dots:
            if dot_id not in group.nodes:
                group.nodes.append(dot_id)

    root_pilots: dict[int, int] = {}  # member node -> pilot identity
    for rel_id in sorted(model.relations):
        rel = model.relations[rel_id]
        if rel.kind == RelationKind.PILOT and rel.root_flag:
            root_pilots.setdefault(rel.b, rel.a)

    result = []
    for root in sorted(groups):
        group = groups[root]
        group.nodes.sort()
        for node_id in group.nodes:
            node = model.nodes[node_id]
            if node.dot_kind is not None:
                continue
            if outgoing.get(node_id, 0) and not incoming.get(node_id, 0):
                group.start_nodes.append(node_id)
            elif incoming.get(node_id, 0) and not outgoing.get(node_id, 0):
                group.final_nodes.append(node_id)
        for node_id in group.nodes:
            if node_id in root_pilots:
                group.root_pilot = root_pilots[node_id]
                break
        result.append(group)
    return result


def process_of(model: Model, node_id: int) -> ProcessGraph | None:
    for proc in processes(model):
        if node_id in proc.nodes:
            return proc
    return None


def resolve_flows(model: Model) -> dict[int, int]:
    """Map each flow-bound arc to its source circle; two bindings on one arc conflict."""
    bindings: dict[int, list[int]] = {}
    for rel_id in sorted(model.relations):
        rel = model.relations[rel_id]
        if rel.kind == RelationKind.FLOW_BINDING:
            bindings.setdefault(rel.b, []).append(rel_id)
    for arc_id, rel_ids in bindings.items():
        if len(rel_ids) > 1:
            raise FlowConflictError(arc_id, rel_ids)
    return {
        arc_id: model.relations[rel_ids[0]].a for arc_id, rel_ids in bindings.items()
    }


def pilots_of(model: Model, node_id: int) -> list[int]:
    """Pilot relation ids targeting a node, ascending."""
    return sorted(
        rel.id
        for rel in model.relations.values()
        if rel.kind == RelationKind.PILOT and rel.b == node_id
    )


def responsible_pilot(model: Model, node_id: int) -> int | None:
    """The identity answering for a node: its own pilot, else its process root."""
    _node(model, node_id)
    own = pilots_of(model, node_id)
    if own:
        return model.relations[own[0]].a
    proc = process_of(model, node_id)
    if proc is not None:
        return proc.root_pilot
    return None


# ---------------------------------------------------------------------------
# projection

_PROCESS_KINDS = {NodeKind.START, NodeKind.FINAL, NodeKind.ACTIVITY, NodeKind.DOT}
_OBJECT_KINDS = {NodeKind.OBJECT, NodeKind.CLASS}


def _matches(filters: list[str], *candidates: str) -> bool:
    return any(fnmatchcase(c, f) for f in filters for c in candidates)


def hidden_closure(model: Model, filters: list[str]) -> set[int]:
    """Elements matched by the filter globs, plus everything left dangling.

    Closure is model-wide, so subtracting it from any view commutes with
    view union: merged minus hidden equals (object minus hidden) union
    (process minus hidden).
    """
    hidden: set[int] = set()
    for node in model.nodes.values():
        if _matches(filters, str(node.id), node.name):
            hidden.add(node.id)
    for circle in model.circles.values():
        if _matches(filters, str(circle.id), circle.name):
            hidden.add(circle.id)
    for table in (model.stars, model.arcs, model.relations):
        for element_id in table:
            if _matches(filters, str(element_id)):
                hidden.add(element_id)

    changed = True
    while changed:
        changed = False
        for circle in model.circles.values():
            if circle.id not in hidden and circle.owner in hidden:
                hidden.add(circle.id)
                changed = True
        for star in model.stars.values():
            if star.id not in hidden and (star.circle in hidden or star.identity in hidden):
                hidden.add(star.id)
                changed = True
        for arc in model.arcs.values():
            if arc.id not in hidden and (arc.src in hidden or arc.dst in hidden):
                hidden.add(arc.id)
                changed = True
        for rel in model.relations.values():
            if rel.id in hidden:
                continue
            if rel.a in hidden or rel.b in hidden or (rel.parent in hidden if rel.parent else False):
                hidden.add(rel.id)
                changed = True
    return hidden


def _object_visible(model: Model, classification: Classification, show_stars: bool) -> set[int]:
    visible: set[int] = set()
    for node_id, kind in classification.kinds.items():
        if kind in _OBJECT_KINDS:
            visible.add(node_id)
    visible.update(model.circles)
    for rel in model.relations.values():
        if rel.kind == RelationKind.ASSOCIATION:
            visible.add(rel.id)
    if show_stars:
        visible.update(model.stars)
        for rel in model.relations.values():
            if rel.kind == RelationKind.INSTANCE_LINK:
                visible.add(rel.id)
    return visible


def _process_visible(model: Model, classification: Classification) -> set[int]:
    visible: set[int] = set()
    for node_id, kind in classification.kinds.items():
        if kind in _PROCESS_KINDS:
            visible.add(node_id)
    visible.update(model.arcs)
    for rel in model.relations.values():
        if rel.kind == RelationKind.PILOT:
            visible.add(rel.id)
            visible.add(rel.a)  # the piloting identity stands in for a swimlane
        elif rel.kind == RelationKind.FLOW_BINDING:
            visible.add(rel.id)
    return visible


def project(
    model: Model,
    view_kind: ViewKind | str,
    filters: list[str] | None = None,
    show_stars: bool = False,
    highlight: set[int] | None = None,
) -> ViewModel:
    """Project the model onto an object, process or merged view.

    Filters are name or id globs; a matching element is hidden together with
    everything that would dangle without it. Stars stay hidden unless
    show_stars is set.
    """
    view_kind = ViewKind(view_kind)
    classification = classify(model)
    if view_kind == ViewKind.OBJECT:
        visible = _object_visible(model, classification, show_stars)
    elif view_kind == ViewKind.PROCESS:
        visible = _process_visible(model, classification)
    else:
        visible = _object_visible(model, classification, show_stars) | _process_visible(
            model, classification
        )

    if filters:
        visible -= hidden_closure(model, filters)

    return ViewModel(
        view_kind=view_kind,
        visible=visible,
        show_stars=show_stars,
        highlight=set(highlight or ()),
    )
