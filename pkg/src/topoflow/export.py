"""View rendering: DOT text for graphviz and the canonical JSON the studio eats.

Output is a pure function of (model, view, classification): element order is
ascending by id, so repeated exports are byte-identical. Layout is left to
the consumer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .model import DotKind, Model, RelationKind
from .topology import Classification, NodeKind, ViewModel, classify, processes

VIEW_SCHEMA_VERSION = "1.0"

_DEFAULT_SHAPES = {
    NodeKind.ACTIVITY: 'shape=box style=rounded',
    NodeKind.START: 'shape=box style=rounded penwidth=2',
    NodeKind.FINAL: 'shape=box style="rounded,bold"',
    NodeKind.OBJECT: 'shape=box',
    NodeKind.CLASS: 'shape=box peripheries=2',
    NodeKind.DOT: 'shape=circle width=0.15 fixedsize=true label=""',
}

_GATE_SHAPE = 'shape=square width=0.12 fixedsize=true style=filled fillcolor=black label=""'
_LABEL_DOT_SHAPE = 'shape=square width=0.15 fixedsize=true label=""'


@dataclass
class RenderStyle:
    shapes: dict[NodeKind, str] = field(default_factory=lambda: dict(_DEFAULT_SHAPES))
    gate: str = _GATE_SHAPE
    label_dot: str = _LABEL_DOT_SHAPE
    circle: str = "shape=ellipse"
    star: str = "shape=square width=0.1 fixedsize=true fontsize=8"
    highlight: str = "style=filled fillcolor=gold penwidth=3"


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _node_attrs(model: Model, node_id: int, kind: NodeKind, style: RenderStyle) -> str:
    node = model.nodes[node_id]
    if kind == NodeKind.DOT:
        if node.dot_kind == DotKind.GATE:
            return style.gate
        if node.dot_kind == DotKind.LABEL:
            return style.label_dot
        return style.shapes[NodeKind.DOT]
    return f"label={_quote(node.name)} {style.shapes[kind]}"


def to_dot(
    model: Model,
    view: ViewModel,
    classification: Classification | None = None,
    style: RenderStyle | None = None,
) -> str:
    """Render a projected view as a directed graph with one cluster per process."""
    classification = classification or classify(model)
    style = style or RenderStyle()
    visible = view.visible

    lines = ["digraph model {", "  rankdir=LR;"]

    emitted: set[int] = set()
    for proc in processes(model):
        members = [n for n in proc.nodes if n in visible]
        if not members:
            continue
        lines.append(f"  subgraph cluster_p{proc.id} {{")
        lines.append(f'    label="process {proc.id}";')
        for node_id in members:
            attrs = _node_attrs(model, node_id, classification.kinds[node_id], style)
            if node_id in view.highlight:
                attrs += " " + style.highlight
            lines.append(f"    n{node_id} [{attrs}];")
            emitted.add(node_id)
        lines.append("  }")

    for node_id in sorted(visible):
        if node_id in emitted or node_id not in model.nodes:
            continue
        attrs = _node_attrs(model, node_id, classification.kinds[node_id], style)
        if node_id in view.highlight:
            attrs += " " + style.highlight
        lines.append(f"  n{node_id} [{attrs}];")

    for circle_id in sorted(visible):
        if circle_id not in model.circles:
            continue
        circle = model.circles[circle_id]
        lines.append(f"  c{circle_id} [label={_quote(circle.name)} {style.circle}];")
        if circle.owner in visible:
            lines.append(f"  n{circle.owner} -> c{circle_id} [style=dotted arrowhead=none];")

    if view.show_stars:
        for star_id in sorted(visible):
            if star_id not in model.stars:
                continue
            star = model.stars[star_id]
            name = model.nodes[star.identity].identity.display_name
            lines.append(f"  s{star_id} [label={_quote(name)} {style.star}];")
            if star.circle in visible:
                lines.append(f"  c{star.circle} -> s{star_id} [style=dotted arrowhead=none];")

    for arc_id in sorted(visible):
        if arc_id not in model.arcs:
            continue
        arc = model.arcs[arc_id]
        if arc.src not in visible or arc.dst not in visible:
            continue
        chain = [f"n{arc.src}"]
        chain += [f"n{d}" for d in arc.dots if d in visible]
        chain.append(f"n{arc.dst}")
        for src, dst in zip(chain, chain[1:]):
            lines.append(f"  {src} -> {dst};")

    for rel_id in sorted(visible):
        if rel_id not in model.relations:
            continue
        rel = model.relations[rel_id]
        if rel.kind == RelationKind.ASSOCIATION:
            if rel.a in visible and rel.b in visible:
                extra = f" label={_quote(rel.multiplicity)}" if rel.multiplicity else ""
                lines.append(f"  c{rel.a} -> c{rel.b} [arrowhead=none{extra}];")
        elif rel.kind == RelationKind.PILOT:
            if rel.a in visible and rel.b in visible:
                name = model.nodes[rel.a].identity.display_name
                lines.append(
                    f"  n{rel.a} -> n{rel.b} [style=dashed label={_quote(name)}];"
                )
        elif rel.kind == RelationKind.FLOW_BINDING:
            arc = model.arcs.get(rel.b)
            if arc is None or rel.a not in visible or rel.b not in visible:
                continue
            visible_dots = [d for d in arc.dots if d in visible]
            head = f"n{visible_dots[0]}" if visible_dots else f"n{arc.dst}"
            lines.append(f"  c{rel.a} -> {head} [color=steelblue penwidth=2];")
        elif rel.kind == RelationKind.INSTANCE_LINK:
            if view.show_stars and rel.a in visible and rel.b in visible:
                lines.append(f"  s{rel.a} -> s{rel.b} [arrowhead=none color=gray50];")

    lines.append("}")
    return "\n".join(lines) + "\n"


def to_view_json(
    model: Model,
    view: ViewModel,
    classification: Classification | None = None,
) -> str:
    """The canonical JSON view document: elements, edges and the star overlay."""
    classification = classification or classify(model)
    visible = view.visible

    elements = []
    for node_id in sorted(visible):
        if node_id in model.nodes:
            node = model.nodes[node_id]
            entry = {
                "id": node_id,
                "kind": classification.kinds[node_id].value,
                "name": node.name,
            }
            if node.dot_kind is not None:
                entry["dot_kind"] = node.dot_kind.value
            if node_id in classification.in_process:
                entry["process"] = classification.in_process[node_id]
            elements.append(entry)
        elif node_id in model.circles:
            circle = model.circles[node_id]
            elements.append(
                {
                    "id": node_id,
                    "kind": "circle",
                    "name": circle.name,
                    "owner": circle.owner,
                }
            )

    edges = []
    for element_id in sorted(visible):
        if element_id in model.arcs:
            arc = model.arcs[element_id]
            edges.append(
                {
                    "id": element_id,
                    "kind": "arc",
                    "from": arc.src,
                    "to": arc.dst,
                    "dots": [d for d in arc.dots if d in visible],
                }
            )
        elif element_id in model.relations:
            rel = model.relations[element_id]
            entry = {
                "id": element_id,
                "kind": rel.kind.value,
                "from": rel.a,
                "to": rel.b,
            }
            if rel.root_flag:
                entry["root"] = True
            if rel.parent is not None:
                entry["parent"] = rel.parent
            if rel.multiplicity is not None:
                entry["multiplicity"] = rel.multiplicity
            edges.append(entry)

    document = {
        "version": VIEW_SCHEMA_VERSION,
        "view": view.view_kind.value,
        "show_stars": view.show_stars,
        "highlight": sorted(view.highlight),
        "elements": elements,
        "edges": edges,
    }
    if view.show_stars:
        stars = []
        for star_id in sorted(visible):
            if star_id not in model.stars:
                continue
            star = model.stars[star_id]
            stars.append(
                {
                    "id": star_id,
                    "identity": star.identity,
                    "name": model.nodes[star.identity].identity.display_name,
                    "circle": star.circle,
                }
            )
        document["sim"] = {"stars": stars}
    return json.dumps(document, separators=(",", ":"), sort_keys=True)
