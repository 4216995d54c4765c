"""Exception types shared across the package."""


class SlowFastError(Exception):
    """Base class for all package-specific errors."""


class BoundaryCase(SlowFastError):
    """A slow-state target sits exactly on a bifurcation boundary.

    Attractor classification is degenerate there, so we refuse to guess a
    stability label instead of silently picking a side.
    """


class RegimeError(SlowFastError):
    """Parameters violate the standing assumption of a regional analysis."""


class PreconditionError(SlowFastError):
    """An analysis was asked to run on data that violates its precondition."""


class DegenerateRadius(SlowFastError):
    """A squared-radius measurement is too small for a meaningful logarithm."""


class NonFiniteState(SlowFastError):
    """Integration produced NaN/Inf; carries the last good state and time."""

    def __init__(self, message, state=None, time=None):
        super().__init__(message)
        self.state = state
        self.time = time


class ScheduleConflict(SlowFastError):
    """An impulse and a pulse edge collide on the same step-grid point."""


class ScenarioValidationError(SlowFastError):
    """A scenario specification failed validation; carries field paths."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
