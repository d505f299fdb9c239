"""Exception hierarchy shared across the package."""

from __future__ import annotations


class TopoflowError(Exception):
    """Base class for all errors raised by this package."""


class ModelError(TopoflowError):
    """A structural operation violated a model invariant or referenced an unknown element."""


class FlowConflictError(TopoflowError):
    """More than one flow binding targets the same arc."""

    def __init__(self, arc_id: int, binding_ids: list[int]):
        self.arc_id = arc_id
        self.binding_ids = binding_ids
        super().__init__(
            f"arc {arc_id} has {len(binding_ids)} flow bindings: {binding_ids}"
        )


class ServiceError(TopoflowError):
    """A service definition or binding is malformed."""


class SimulationError(TopoflowError):
    """The kernel was asked to do something its current state forbids."""


class TruncationError(SimulationError):
    """Event budget exhausted before the run completed; partial trace attached."""

    def __init__(self, message: str, trace):
        self.trace = trace
        super().__init__(message)


class DocumentError(TopoflowError):
    """A model document failed to parse, validate or resolve."""
