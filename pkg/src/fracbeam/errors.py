"""Error types shared across the toolkit.

Domain errors on scalar inputs (negative time, frequency <= 0, alpha out of
range, ...) raise plain ``ValueError`` at the call site; the classes below
cover failures of the numerical machinery itself.
"""


class EigenSearchError(RuntimeError):
    """Fewer sign changes than requested modes inside the search interval."""


class QuadratureError(RuntimeError):
    """Adaptive panel refinement did not converge within the refinement cap."""


class StepFailureError(RuntimeError):
    """Implicit solve failed at one time step, after the bisection fallback."""

    def __init__(self, step: int, message: str):
        super().__init__(f"step {step}: {message}")
        self.step = step


class InsufficientDataError(ValueError):
    """Not enough samples/peaks in the requested window to fit anything."""
