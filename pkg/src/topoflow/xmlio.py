"""Canonical XML persistence for models.

The writer is deterministic: elements are emitted in ascending id order with
a fixed attribute order, UTF-8 encoded, LF line endings. Saving the same
model twice yields identical bytes, and load(save(m)) is structurally equal
to m, circle and star order included.

Graphics (positions, colors) are deliberately not part of the document; the
model describes structure only.
"""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from xml.sax.saxutils import quoteattr

from .errors import DocumentError
from .model import (
    Arc,
    Circle,
    DotKind,
    Identity,
    Instruction,
    Model,
    Node,
    Relation,
    RelationKind,
    Service,
    Star,
    check_integrity,
)

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
_MAJOR, _MINOR = (int(part) for part in SCHEMA_VERSION.split("."))

FILE_EXTENSION = ".topo.xml"

_KNOWN_TAGS = {"node", "attr", "circle", "star", "arc", "dot-ref", "relation", "service", "instr"}

# per-op attribute names for <instr>
_INSTR_ATTRS = {
    "WAIT": ("duration",),
    "LINK": ("relation", "selector"),
    "DUPLICATE_TO": ("circle",),
    "PLACE_IN": ("circle",),
    "EMIT": ("tag",),
    "ROUTE": ("arc",),
    "FORWARD": (),
    "DESTROY": (),
}


def save_xml(model: Model) -> bytes:
    """Serialize a model to canonical bytes."""
    problems = check_integrity(model)
    if problems:
        raise DocumentError("refusing to save a broken model: " + "; ".join(problems))

    out: list[str] = ['<?xml version="1.0" encoding="UTF-8"?>']
    out.append(f'<model version="{SCHEMA_VERSION}" next-id="{model.next_id}">')

    for node_id in sorted(model.nodes):
        node = model.nodes[node_id]
        bits = [f'id="{node.id}"', f"name={quoteattr(node.name)}"]
        if node.dot_kind is not None:
            bits.append(f'dot-kind="{node.dot_kind.value}"')
        if node.attributes:
            out.append(f"  <node {' '.join(bits)}>")
            for key in sorted(node.attributes):
                out.append(
                    f"    <attr name={quoteattr(key)} value={quoteattr(node.attributes[key])}/>"
                )
            out.append("  </node>")
        else:
            out.append(f"  <node {' '.join(bits)}/>")

    for circle_id in sorted(model.circles):
        circle = model.circles[circle_id]
        out.append(
            f'  <circle id="{circle.id}" owner="{circle.owner}" name={quoteattr(circle.name)}/>'
        )

    for star_id in sorted(model.stars):
        star = model.stars[star_id]
        out.append(
            f'  <star id="{star.id}" identity="{star.identity}" circle="{star.circle}"/>'
        )

    for arc_id in sorted(model.arcs):
        arc = model.arcs[arc_id]
        out.append(f'  <arc id="{arc.id}" from="{arc.src}" to="{arc.dst}"/>')

    for arc_id in sorted(model.arcs):
        for pos, dot_id in enumerate(model.arcs[arc_id].dots):
            out.append(f'  <dot-ref arc="{arc_id}" node="{dot_id}" pos="{pos}"/>')

    for rel_id in sorted(model.relations):
        rel = model.relations[rel_id]
        bits = [f'id="{rel.id}"', f'kind="{rel.kind.value}"', f'a="{rel.a}"', f'b="{rel.b}"']
        if rel.root_flag:
            bits.append('root="true"')
        if rel.parent is not None:
            bits.append(f'parent="{rel.parent}"')
        if rel.multiplicity is not None:
            bits.append(f"multiplicity={quoteattr(rel.multiplicity)}")
        out.append(f"  <relation {' '.join(bits)}/>")

    for service_id in sorted(model.services):
        service = model.services[service_id]
        out.append(
            f'  <service id="{service.id}" pilot="{service.pilot}" target="{service.target}">'
        )
        for instr in service.instructions:
            out.append(f"    {_instr_to_xml(instr)}")
        out.append("  </service>")

    out.append("</model>")
    return ("\n".join(out) + "\n").encode("utf-8")


def _instr_to_xml(instr: Instruction) -> str:
    bits = [f'op="{instr.op}"']
    for attr in _INSTR_ATTRS[instr.op]:
        if attr == "duration":
            bits.append(f'duration="{instr.amount!r}"')
        elif attr in ("relation", "circle", "arc"):
            bits.append(f'{attr}="{instr.ref}"')
        elif attr == "selector":
            bits.append(f"selector={quoteattr(instr.text)}")
        elif attr == "tag":
            bits.append(f"tag={quoteattr(instr.text)}")
    return f"<instr {' '.join(bits)}/>"


# ---------------------------------------------------------------------------
# loading

def _int_attr(element: ET.Element, name: str) -> int:
    raw = element.get(name)
    if raw is None:
        raise DocumentError(f"<{element.tag}> is missing attribute {name!r}")
    try:
        return int(raw)
    except ValueError:
        raise DocumentError(f"<{element.tag}> attribute {name!r} is not an id: {raw!r}") from None


def load_xml(data: bytes | str) -> Model:
    """Rebuild a model from document bytes; dangling references are fatal."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise DocumentError(f"malformed XML: {exc}") from None
    if root.tag != "model":
        raise DocumentError(f"expected <model> root, found <{root.tag}>")

    # reading tolerates a missing version (assumed current); writing always
    # stamps it and validate_xml insists on it
    version = root.get("version", SCHEMA_VERSION)
    try:
        major, minor = (int(part) for part in version.split("."))
    except ValueError:
        raise DocumentError(f"unparseable version {version!r}") from None
    if major != _MAJOR:
        raise DocumentError(f"unsupported major version {version}")
    newer_minor = minor > _MINOR

    model = Model()
    dot_refs: list[tuple[int, int, int]] = []

    for element in root:
        if element.tag == "node":
            node_id = _int_attr(element, "id")
            name = element.get("name")
            if name is None:
                raise DocumentError(f"node {node_id} has no name")
            raw_kind = element.get("dot-kind")
            try:
                dot_kind = DotKind(raw_kind) if raw_kind is not None else None
            except ValueError:
                raise DocumentError(f"node {node_id} has unknown dot-kind {raw_kind!r}") from None
            attributes: dict[str, str] = {}
            for child in element:
                if child.tag != "attr":
                    _unknown(child.tag, newer_minor)
                    continue
                key, value = child.get("name"), child.get("value")
                if key is None or value is None:
                    raise DocumentError(f"node {node_id} has a malformed <attr>")
                attributes[key] = value
            _store(model.nodes, node_id, Node(
                id=node_id, name=name,
                identity=Identity(id=node_id, display_name=name),
                dot_kind=dot_kind, attributes=attributes,
            ))
        elif element.tag == "circle":
            circle_id = _int_attr(element, "id")
            name = element.get("name")
            if name is None:
                raise DocumentError(f"circle {circle_id} has no name")
            _store(model.circles, circle_id, Circle(
                id=circle_id, owner=_int_attr(element, "owner"), name=name,
            ))
        elif element.tag == "star":
            star_id = _int_attr(element, "id")
            _store(model.stars, star_id, Star(
                id=star_id,
                identity=_int_attr(element, "identity"),
                circle=_int_attr(element, "circle"),
            ))
        elif element.tag == "arc":
            arc_id = _int_attr(element, "id")
            _store(model.arcs, arc_id, Arc(
                id=arc_id, src=_int_attr(element, "from"), dst=_int_attr(element, "to"),
            ))
        elif element.tag == "dot-ref":
            dot_refs.append((
                _int_attr(element, "arc"), _int_attr(element, "pos"), _int_attr(element, "node"),
            ))
        elif element.tag == "relation":
            rel_id = _int_attr(element, "id")
            raw_kind = element.get("kind")
            try:
                kind = RelationKind(raw_kind)
            except ValueError:
                raise DocumentError(f"relation {rel_id} has unknown kind {raw_kind!r}") from None
            parent = element.get("parent")
            _store(model.relations, rel_id, Relation(
                id=rel_id, kind=kind,
                a=_int_attr(element, "a"), b=_int_attr(element, "b"),
                root_flag=element.get("root") == "true",
                parent=int(parent) if parent is not None else None,
                multiplicity=element.get("multiplicity"),
            ))
        elif element.tag == "service":
            service_id = _int_attr(element, "id")
            instructions = []
            for child in element:
                if child.tag != "instr":
                    _unknown(child.tag, newer_minor)
                    continue
                instructions.append(_instr_from_xml(child))
            _store(model.services, service_id, Service(
                id=service_id,
                pilot=_int_attr(element, "pilot"),
                target=_int_attr(element, "target"),
                instructions=instructions,
            ))
        else:
            _unknown(element.tag, newer_minor)

    # membership lists are recoverable because stars never change circles and
    # circles never change owners: creation order equals ascending id order
    for circle_id in sorted(model.circles):
        circle = model.circles[circle_id]
        owner = model.nodes.get(circle.owner)
        if owner is None:
            raise DocumentError(f"circle {circle_id} references missing node {circle.owner}")
        owner.circles.append(circle_id)
    for star_id in sorted(model.stars):
        star = model.stars[star_id]
        circle = model.circles.get(star.circle)
        if circle is None:
            raise DocumentError(f"star {star_id} references missing circle {star.circle}")
        if star.identity not in model.nodes:
            raise DocumentError(f"star {star_id} references missing identity {star.identity}")
        circle.stars.append(star_id)
    for arc_id, pos, node_id in sorted(dot_refs):
        arc = model.arcs.get(arc_id)
        if arc is None:
            raise DocumentError(f"dot-ref references missing arc {arc_id}")
        if node_id not in model.nodes:
            raise DocumentError(f"dot-ref references missing node {node_id}")
        if pos != len(arc.dots):
            raise DocumentError(f"dot positions on arc {arc_id} are not contiguous")
        arc.dots.append(node_id)

    declared_next = root.get("next-id")
    used = [
        *model.nodes, *model.circles, *model.stars,
        *model.arcs, *model.relations, *model.services,
    ]
    floor = max(used, default=0) + 1
    model.next_id = max(floor, int(declared_next)) if declared_next else floor

    problems = check_integrity(model)
    if problems:
        raise DocumentError("document violates model invariants: " + "; ".join(problems))
    return model


def _store(table: dict, element_id: int, value) -> None:
    if element_id in table:
        raise DocumentError(f"duplicate element id {element_id}")
    table[element_id] = value


def _unknown(tag: str, newer_minor: bool) -> None:
    if newer_minor:
        log.warning("ignoring element <%s> from a newer minor version", tag)
    else:
        raise DocumentError(f"unknown element <{tag}>")


def _instr_from_xml(element: ET.Element) -> Instruction:
    op = element.get("op")
    if op not in _INSTR_ATTRS:
        raise DocumentError(f"unknown instruction op {op!r}")
    instr = Instruction(op=op)
    for attr in _INSTR_ATTRS[op]:
        raw = element.get(attr)
        if raw is None:
            raise DocumentError(f"instruction {op} is missing attribute {attr!r}")
        if attr == "duration":
            instr.amount = float(raw)
        elif attr in ("relation", "circle", "arc"):
            instr.ref = int(raw)
        else:
            instr.text = raw
    return instr


def validate_xml(data: bytes | str) -> list[str]:
    """Structural schema check; returns problems, empty when the document is valid."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    problems: list[str] = []
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        return [f"malformed XML: {exc}"]
    if root.tag == "model" and root.get("version") is None:
        problems.append("missing mandatory version attribute")
    try:
        load_xml(data)
    except DocumentError as exc:
        problems.append(str(exc))
    return problems
