"""Exception hierarchy.

Everything derived from :class:`ValidationError` signals bad input (the CLI
maps it to exit code 2); :class:`PropertyViolation` signals that a checked
bound failed on a concrete instance (exit code 1).
"""

from __future__ import annotations


class ValidationError(ValueError):
    """Input does not satisfy a documented precondition."""


class GraphError(ValidationError):
    pass


class LayeringError(GraphError):
    """An edge does not connect consecutive layers, or a layer index is out of range."""


class Disconnected(GraphError):
    """No start-to-target path survives pruning."""


class NegativeWeight(GraphError):
    """Edge weight is negative or not finite."""


class CycleDetected(GraphError):
    pass


class TargetUnreachable(GraphError):
    pass


class DistributionError(ValidationError):
    pass


class DegenerateObjective(UserWarning):
    """Both objective coefficients are zero; any price is optimal."""


class NonMonotoneMenu(ValidationError):
    pass


class UnboundedRatio(ValidationError):
    """The distribution has z = +inf, so no finite worst case exists."""


class InvalidThreshold(ValidationError):
    pass


class NotDominant(ValidationError):
    pass


class NoValidFraction(ValidationError):
    pass


class NoValidDelta(RuntimeError):
    """Internal: the delta scan failed although the fraction interval was nonempty."""


class ConditionUnsatisfiable(ValidationError):
    pass


class PreconditionFailed(ValidationError):
    """A graph handed to a bound check lacks the structural property the bound needs."""


class PropertyViolation(AssertionError):
    """A checked bound failed; ``detail`` carries the offending instance."""

    def __init__(self, message: str, detail: object = None) -> None:
        super().__init__(message)
        self.detail = detail
