"""Exception types raised across the package."""


class TomometricsError(Exception):
    """Base class for all package errors."""


class InvalidState(TomometricsError, ValueError):
    pass


class InconsistentTomogram(TomometricsError, ValueError):
    pass


class InvalidTensor(TomometricsError, ValueError):
    pass


class DomainError(TomometricsError, ValueError):
    pass


class Singular(TomometricsError, ValueError):
    """Metric quantity evaluated at a pure state or outside (-1, 1)."""


class DegenerateScheme(TomometricsError, ValueError):
    pass


class InvalidScheme(TomometricsError, ValueError):
    pass


class NonInvertibleScheme(TomometricsError, ValueError):
    pass


class InvalidPetzFunction(TomometricsError, ValueError):
    pass


class InvalidMetric(TomometricsError, ValueError):
    pass


class RemovableSingularity(TomometricsError, ValueError):
    pass


class SolverError(TomometricsError, RuntimeError):
    """ODE failure. ``partial`` holds the grid computed before the failure, if any."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class RangeEscape(SolverError):
    pass


class BranchFailure(SolverError):
    pass


class StepFailure(SolverError):
    pass


class EndpointSingularity(SolverError):
    pass
