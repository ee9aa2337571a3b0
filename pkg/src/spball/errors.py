"""Exception types raised by the solver."""

from __future__ import annotations


class InvalidGridError(ValueError):
    """Grid resolution too coarse or otherwise unusable."""


class GridMismatchError(ValueError):
    """Two fields (or a field and a problem) live on different grids."""


class InvalidExponentError(ValueError):
    """Norm exponent outside [1, inf)."""


class AssumptionViolationError(ValueError):
    """Problem data violates a structural assumption (sign conditions, exponent range)."""


class OutsideBallError(ValueError):
    """A field that must lie in the constraint ball does not."""


class ForcingTooLargeError(ValueError):
    """Forcing norm exceeds the admissible bound computed from the ball radius.

    Carries the bound so callers can rescale.
    """

    def __init__(self, actual: float, bound: float):
        self.actual = actual
        self.bound = bound
        super().__init__(
            f"forcing L3 norm {actual:.6e} exceeds the admissible bound {bound:.6e}; "
            "rescale the forcing field or use kind 'scaled_to_bound'"
        )


class InitializationFailureError(RuntimeError):
    """No starting point with negative energy could be certified."""


class EstimationFailureError(RuntimeError):
    """Constant estimation had no usable samples."""


class IterativeSolverError(RuntimeError):
    """Linear solve failed to reach the residual target within the iteration budget.

    The discrete-L2 residual history is attached as ``residual_history``.
    """

    def __init__(self, message: str, residual_history: list[float]):
        self.residual_history = list(residual_history)
        super().__init__(message)


class ConfigError(ValueError):
    """Malformed experiment configuration."""
