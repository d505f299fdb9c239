"""Pilot services: the instruction list run when a token enters a node.

A service is bound to a (pilot identity, target node) pair. The pilot must
answer for the target, either through its own pilot relation or as root pilot
of the enclosing process. A node without a service of its own inherits the
one bound to the node carrying the process's root pilot; with nothing bound
anywhere the kernel falls back to a bare FORWARD.

Role and behavior vary independently: rebinding swaps the instruction list
without touching the pilot relation, and repiloting keeps services addressed
to the new responsible identity.
"""

from __future__ import annotations

from fnmatch import fnmatchcase

from .errors import ServiceError
from .model import (
    Instruction,
    Model,
    RelationKind,
    Service,
    TERMINAL_OPS,
    delete_element,
    instantiate_association,
    members,
    place_star,
    star_of,
)
from .topology import process_of, responsible_pilot


# shorthand constructors for readable service definitions
def wait(amount: float) -> Instruction:
    return Instruction(op="WAIT", amount=amount)


def link(association_id: int, selector: str) -> Instruction:
    return Instruction(op="LINK", ref=association_id, text=selector)


def duplicate_to(circle_id: int) -> Instruction:
    return Instruction(op="DUPLICATE_TO", ref=circle_id)


def place_in(circle_id: int) -> Instruction:
    return Instruction(op="PLACE_IN", ref=circle_id)


def emit(tag: str) -> Instruction:
    return Instruction(op="EMIT", text=tag)


def route(arc_id: int) -> Instruction:
    return Instruction(op="ROUTE", ref=arc_id)


def forward() -> Instruction:
    return Instruction(op="FORWARD")


def destroy() -> Instruction:
    return Instruction(op="DESTROY")


def _validate_instructions(
    model: Model, target: int, instructions: list[Instruction]
) -> None:
    if not instructions:
        raise ServiceError("a service needs at least one instruction")
    for position, instr in enumerate(instructions):
        terminal = instr.op in TERMINAL_OPS
        if terminal and position != len(instructions) - 1:
            raise ServiceError(f"terminal {instr.op} must be the last instruction")
        if instr.op == "WAIT":
            if instr.amount is None or instr.amount < 0:
                raise ServiceError("WAIT needs a non-negative duration")
        elif instr.op == "LINK":
            rel = model.relations.get(instr.ref)
            if rel is None or rel.kind != RelationKind.ASSOCIATION:
                raise ServiceError(f"LINK target {instr.ref} is not an association")
            if not instr.text:
                raise ServiceError("LINK needs a member selector")
        elif instr.op in ("DUPLICATE_TO", "PLACE_IN"):
            if instr.ref not in model.circles:
                raise ServiceError(f"{instr.op} target {instr.ref} is not a circle")
        elif instr.op == "EMIT":
            if not instr.text:
                raise ServiceError("EMIT needs a tag")
        elif instr.op == "ROUTE":
            arc = model.arcs.get(instr.ref)
            if arc is None:
                raise ServiceError(f"ROUTE target {instr.ref} is not an arc")
            if arc.src != target:
                raise ServiceError(
                    f"ROUTE arc {instr.ref} does not leave node {target}"
                )
        elif instr.op in ("FORWARD", "DESTROY"):
            pass
        else:
            raise ServiceError(f"unknown instruction {instr.op!r}")


def bind_service(
    model: Model, pilot: int, target: int, instructions: list[Instruction]
) -> int:
    """Attach (or atomically replace) the service a pilot runs at a node."""
    if target not in model.nodes:
        raise ServiceError(f"unknown target node {target}")
    piloted = any(
        rel.kind == RelationKind.PILOT and rel.a == pilot and rel.b == target
        for rel in model.relations.values()
    )
    if not piloted and responsible_pilot(model, target) != pilot:
        raise ServiceError(f"identity {pilot} does not pilot node {target}")
    _validate_instructions(model, target, instructions)
    for service in model.services.values():
        if service.pilot == pilot and service.target == target:
            service.instructions = list(instructions)
            return service.id
    service_id = model.fresh_id()
    model.services[service_id] = Service(
        id=service_id, pilot=pilot, target=target, instructions=list(instructions)
    )
    return service_id


def unbind_service(model: Model, pilot: int, target: int) -> bool:
    for service_id in sorted(model.services):
        service = model.services[service_id]
        if service.pilot == pilot and service.target == target:
            del model.services[service_id]
            return True
    return False


def resolve_service(model: Model, node_id: int) -> Service | None:
    """The node's own service, else the process root pilot's."""
    for service_id in sorted(model.services):
        if model.services[service_id].target == node_id:
            return model.services[service_id]
    proc = process_of(model, node_id)
    if proc is None or proc.root_pilot is None:
        return None
    for rel_id in sorted(model.relations):
        rel = model.relations[rel_id]
        if rel.kind == RelationKind.PILOT and rel.root_flag and rel.a == proc.root_pilot and rel.b in proc.nodes:
            for service_id in sorted(model.services):
                service = model.services[service_id]
                if service.pilot == proc.root_pilot and service.target == rel.b:
                    return service
            return None
    return None


_DEFAULT = [forward()]


def execute(sim, node_id: int, token) -> None:
    """Run the responsible service for a token that just entered a node.

    An unresolvable LINK parks the token where it stands: a service_fault is
    emitted and the remaining instructions, terminal included, are skipped.
    """
    model: Model = sim.model
    service = resolve_service(model, node_id)
    heading = {"node": node_id, "token": token.id}
    if service is not None:
        heading["service"] = service.id
        heading["pilot"] = service.pilot
    sim.emit("service_executed", **heading)

    instructions = service.instructions if service is not None else _DEFAULT
    selection: list[int] = []
    extra_wait: float | None = None

    for instr in instructions:
        if instr.op == "WAIT":
            extra_wait = (extra_wait or 0.0) + instr.amount
        elif instr.op == "LINK":
            if not _run_link(sim, node_id, token, instr, selection):
                return  # parked
        elif instr.op == "DUPLICATE_TO":
            for identity in selection:
                _place_silently(sim, identity, instr.ref)
        elif instr.op == "PLACE_IN":
            _place_silently(sim, token.identity, instr.ref)
        elif instr.op == "EMIT":
            sim.emit("tag_emitted", node=node_id, token=token.id, detail=instr.text)
        elif instr.op == "DESTROY":
            _finish(sim, node_id, token, destroy_star=True)
            return
        elif instr.op == "ROUTE":
            dwell = sim.config.default_dwell if extra_wait is None else extra_wait
            sim.schedule_fire(token, instr.ref, dwell)
            return
        elif instr.op == "FORWARD":
            _run_forward(sim, node_id, token, extra_wait)
            return
    # no terminal instruction: the token deliberately parks here


def _run_link(sim, node_id: int, token, instr: Instruction, selection: list[int]) -> bool:
    model: Model = sim.model
    assoc = model.relations[instr.ref]
    near = star_of(model, token.identity, assoc.a)
    far_circle = assoc.b
    if near is None:
        near = star_of(model, token.identity, assoc.b)
        far_circle = assoc.a
    if near is None:
        sim.emit(
            "service_fault", node=node_id, token=token.id,
            detail=f"token has no star in either endpoint of association {assoc.id}",
        )
        return False
    matched = [
        identity.id
        for identity in members(model, far_circle)
        if fnmatchcase(identity.display_name, instr.text)
    ]
    if not matched:
        sim.emit(
            "service_fault", node=node_id, token=token.id,
            detail=f"selector {instr.text!r} matches nothing in circle {far_circle}",
        )
        return False
    for identity_id in matched:
        far = star_of(model, identity_id, far_circle)
        link_id = instantiate_association(model, assoc.id, near, far)
        rel = model.relations[link_id]
        sim.emit(
            "link_created",
            token=token.id, relation=link_id, parent=assoc.id, a=rel.a, b=rel.b,
        )
    selection[:] = matched
    return True


def _place_silently(sim, identity: int, circle_id: int) -> None:
    # an identity already in the circle stays put; placement is idempotent
    if star_of(sim.model, identity, circle_id) is not None:
        return
    star_id = place_star(sim.model, identity, circle_id)
    sim.emit("star_created", identity=identity, circle=circle_id, star=star_id)


def _finish(sim, node_id: int, token, destroy_star: bool) -> None:
    if destroy_star and token.current_star is not None:
        star = sim.model.stars[token.current_star]
        sim.emit(
            "star_destroyed",
            identity=star.identity, circle=star.circle, star=star.id,
        )
        delete_element(sim.model, star.id)
        token.current_star = None
    token.finished = True
    sim.emit("token_finished", token=token.id, node=node_id)


def _run_forward(sim, node_id: int, token, extra_wait: float | None) -> None:
    outgoing = sorted(
        arc_id for arc_id, arc in sim.model.arcs.items() if arc.src == node_id
    )
    if not outgoing:
        # journey complete; the star rests in the final node's place circle
        token.finished = True
        sim.emit("token_finished", token=token.id, node=node_id)
        return
    if len(outgoing) > 1:
        sim.emit(
            "warning",
            node=node_id, token=token.id,
            detail=f"{len(outgoing)} outgoing arcs and no ROUTE; taking arc {outgoing[0]}",
        )
    dwell = sim.config.default_dwell if extra_wait is None else extra_wait
    sim.schedule_fire(token, outgoing[0], dwell)
