"""Model review rules.

Six structural rules (L1..L6) check that a model is ready to simulate and
monitor, mirroring how a process model and its data model are consolidated:
processes are well-formed, tokens are identified and classed, identity
boundaries carry dots and gates, every stage names its data, and every pilot
knows what to do. W-branch flags silently resolved branch choices.

Only rules that would break a run are errors; everything else warns.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .model import DotKind, Model, RelationKind
from .services import resolve_service
from .topology import NodeKind, classify, processes

SEVERITIES = {
    "L1": "error",
    "L2": "error",
    "L3": "warning",
    "L4": "warning",
    "L5": "warning",
    "L6": "warning",
    "W-branch": "warning",
}


@dataclass(frozen=True)
class Finding:
    rule: str
    severity: str
    subject: int
    message: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "rule": self.rule,
                "severity": self.severity,
                "subject": self.subject,
                "message": self.message,
            },
            separators=(",", ":"),
        )


def _finding(rule: str, subject: int, message: str) -> Finding:
    return Finding(rule=rule, severity=SEVERITIES[rule], subject=subject, message=message)


def lint(model: Model) -> list[Finding]:
    """All findings, deterministically ordered by (rule, subject)."""
    findings: list[Finding] = []
    classification = classify(model)
    procs = processes(model)

    bindings = [
        rel for _, rel in sorted(model.relations.items())
        if rel.kind == RelationKind.FLOW_BINDING
    ]
    associations = [
        rel for _, rel in sorted(model.relations.items())
        if rel.kind == RelationKind.ASSOCIATION
    ]
    assoc_circles = {end for rel in associations for end in (rel.a, rel.b)}

    # L1: every process needs at least one start and one final node
    for proc in procs:
        if not proc.start_nodes:
            findings.append(_finding("L1", proc.id, f"process {proc.id} has no start node"))
        if not proc.final_nodes:
            findings.append(_finding("L1", proc.id, f"process {proc.id} has no final node"))

    # L2: every process needs one unambiguous token source
    per_arc: dict[int, list[int]] = {}
    for rel in bindings:
        per_arc.setdefault(rel.b, []).append(rel.id)
    for proc in procs:
        bound = [a for a in proc.arcs if a in per_arc]
        if not bound:
            findings.append(
                _finding("L2", proc.id, f"process {proc.id} has no flow binding; no tokens can enter")
            )
    for arc_id in sorted(per_arc):
        if len(per_arc[arc_id]) > 1:
            findings.append(
                _finding(
                    "L2", arc_id,
                    f"arc {arc_id} has {len(per_arc[arc_id])} flow bindings; token source is ambiguous",
                )
            )

    # L3: token sources must be backed by a class that defines static data
    for rel in bindings:
        circle = model.circles[rel.a]
        backed = bool(model.nodes[circle.owner].attributes)
        if not backed:
            for assoc in associations:
                if rel.a not in (assoc.a, assoc.b):
                    continue
                other = assoc.b if assoc.a == rel.a else assoc.a
                if model.nodes[model.circles[other].owner].attributes:
                    backed = True
                    break
        if not backed:
            findings.append(
                _finding(
                    "L3", rel.a,
                    f"token-source circle {rel.a} has no class defining static attributes",
                )
            )

    # L4: transitions that keep both memberships alive must carry a dot
    bound_arcs_by_circle: dict[int, list[int]] = {}
    for rel in bindings:
        bound_arcs_by_circle.setdefault(rel.a, []).append(rel.b)
    for arc_id in sorted(model.arcs):
        arc = model.arcs[arc_id]
        has_duplicate = any(
            model.nodes[d].dot_kind == DotKind.DUPLICATE for d in arc.dots
        )
        if has_duplicate:
            continue
        sources = [rel.a for rel in bindings if rel.b == arc_id]
        if sources:
            for circle_id in sources:
                keeps_membership = circle_id in assoc_circles or len(
                    bound_arcs_by_circle.get(circle_id, [])
                ) > 1
                if keeps_membership:
                    findings.append(
                        _finding(
                            "L4", arc_id,
                            f"entry arc {arc_id} moves identities out of circle {circle_id} "
                            "although that membership persists; add a duplication dot",
                        )
                    )
        else:
            src_circles = set(model.nodes[arc.src].circles)
            dst_circles = set(model.nodes[arc.dst].circles)
            for assoc in associations:
                if (assoc.a in src_circles and assoc.b in dst_circles) or (
                    assoc.b in src_circles and assoc.a in dst_circles
                ):
                    findings.append(
                        _finding(
                            "L4", arc_id,
                            f"arc {arc_id} crosses association {assoc.id} between "
                            "non-exclusive activities; add a duplication dot",
                        )
                    )
                    break

    # L5: every activity must name its data
    dot_arcs: dict[int, list[int]] = {}
    for arc_id in sorted(model.arcs):
        for dot_id in model.arcs[arc_id].dots:
            dot_arcs.setdefault(arc_id, []).append(dot_id)
    for node_id in sorted(model.nodes):
        if classification.kinds[node_id] != NodeKind.ACTIVITY:
            continue
        if _has_data_relation(model, node_id, assoc_circles, dot_arcs):
            continue
        findings.append(
            _finding(
                "L5", node_id,
                f"activity {node_id} declares no input, intermediate or produced data",
            )
        )

    # L6: every pilot needs a bound service
    for rel_id in sorted(model.relations):
        rel = model.relations[rel_id]
        if rel.kind != RelationKind.PILOT:
            continue
        bound = any(
            svc.pilot == rel.a and svc.target == rel.b
            for svc in model.services.values()
        )
        if not bound:
            role = "root pilot" if rel.root_flag else "pilot"
            findings.append(
                _finding(
                    "L6", rel.id,
                    f"{role} {rel.a} of node {rel.b} has no bound service",
                )
            )

    # W-branch: branch choices should be explicit
    outdegree: dict[int, int] = {}
    for arc in model.arcs.values():
        outdegree[arc.src] = outdegree.get(arc.src, 0) + 1
    for node_id in sorted(model.nodes):
        if classification.kinds[node_id] != NodeKind.ACTIVITY:
            continue
        if outdegree.get(node_id, 0) <= 1:
            continue
        service = resolve_service(model, node_id)
        routed = service is not None and any(
            instr.op == "ROUTE" for instr in service.instructions
        )
        if not routed:
            findings.append(
                _finding(
                    "W-branch", node_id,
                    f"activity {node_id} has {outdegree[node_id]} outgoing arcs and no ROUTE; "
                    "the lowest-id arc will be taken",
                )
            )

    findings.sort(key=lambda f: (f.rule, f.subject))
    return findings


def _has_data_relation(
    model: Model, node_id: int, assoc_circles: set[int], dot_arcs: dict[int, list[int]]
) -> bool:
    node = model.nodes[node_id]
    if any(c in assoc_circles for c in node.circles):
        return True
    for rel in model.relations.values():
        if rel.kind == RelationKind.FLOW_BINDING and model.circles[rel.a].owner == node_id:
            return True
    for arc_id, dots in dot_arcs.items():
        arc = model.arcs[arc_id]
        if node_id not in (arc.src, arc.dst):
            continue
        for dot_id in dots:
            if any(c in assoc_circles for c in model.nodes[dot_id].circles):
                return True
    service = resolve_service(model, node_id)
    if service is not None and any(
        instr.op in ("LINK", "DUPLICATE_TO", "PLACE_IN") for instr in service.instructions
    ):
        return True
    return False


def errors_in(findings: list[Finding]) -> list[Finding]:
    return [f for f in findings if f.severity == "error"]
