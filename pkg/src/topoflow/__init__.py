"""Merged object/process modeling: one graph, simulated tokens, projected views."""

from .errors import (
    DocumentError,
    FlowConflictError,
    ModelError,
    ServiceError,
    SimulationError,
    TopoflowError,
    TruncationError,
)
from .export import RenderStyle, to_dot, to_view_json
from .kernel import (
    SimConfig,
    SimState,
    Token,
    Trace,
    TraceEvent,
    fire,
    init_sim,
    inject,
    run,
    step,
    subscribe,
    unsubscribe,
)
from .lint import Finding, lint
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
    add_circle,
    add_node,
    add_relation,
    check_integrity,
    connect_arc,
    delete_element,
    insert_dot,
    instantiate_association,
    members,
    place_star,
    placements,
    star_of,
)
from .services import bind_service, resolve_service, unbind_service
from .topology import (
    Classification,
    NodeKind,
    ProcessGraph,
    ViewKind,
    ViewModel,
    classify,
    processes,
    project,
    resolve_flows,
    responsible_pilot,
)
from .xmlio import load_xml, save_xml, validate_xml

__version__ = "0.1.0"

__all__ = [
    "Arc", "Circle", "Classification", "DocumentError", "DotKind", "Finding",
    "FlowConflictError", "Identity", "Instruction", "Model", "ModelError",
    "Node", "NodeKind", "ProcessGraph", "Relation", "RelationKind",
    "RenderStyle", "Service", "ServiceError", "SimConfig", "SimState",
    "SimulationError", "Star", "Token", "TopoflowError", "Trace", "TraceEvent",
    "TruncationError", "ViewKind", "ViewModel", "add_circle", "add_node",
    "add_relation", "bind_service", "check_integrity", "classify",
    "connect_arc", "delete_element", "fire", "init_sim", "inject",
    "insert_dot", "instantiate_association", "lint", "load_xml", "members",
    "place_star", "placements", "processes", "project", "resolve_flows",
    "resolve_service", "responsible_pilot", "run", "save_xml", "star_of",
    "step", "subscribe", "to_dot", "to_view_json", "unbind_service",
    "unsubscribe", "validate_xml",
]
