"""Exception types shared across the package."""


class ScheduleRangeError(ValueError):
    """Time argument outside the schedule's [0, duration] window."""


class UndefinedAmplitudeError(ValueError):
    """Transport amplitude requested for a schedule with zero displacement."""


class NotInCatalogError(KeyError):
    """Requested potential is not part of the driving catalog."""


class UnboundedMotionError(ValueError):
    """Energy shell is not closed; no pair of turning points exists."""


class IntegrationFailure(RuntimeError):
    """Adaptive integrator could not reach the requested time."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class GridExtentError(ValueError):
    """State support is clipped by the spatial grid."""


class LeakageError(RuntimeError):
    """Propagated amplitude reached the grid boundary."""


class ResolutionError(ValueError):
    """Grid too coarse to resolve the requested state."""


class ConvergenceError(RuntimeError):
    """Iterative solver exhausted its iteration budget."""
