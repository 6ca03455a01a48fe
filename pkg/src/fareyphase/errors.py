"""Exception types shared across the package.

The CLI maps these onto exit codes: parameter validation problems exit
with 2, numeric failures discovered during a computation exit with 3.
"""


class FareyPhaseError(Exception):
    """Base class for all package-specific errors."""


class LevelCapError(FareyPhaseError, ValueError):
    """A level k was requested beyond the documented cap for the operation."""


class OverflowCapError(FareyPhaseError, OverflowError):
    """Denominators at the requested level would not fit in 64-bit integers."""


class CrossCheckError(FareyPhaseError, RuntimeError):
    """Two supposedly equivalent code paths disagreed beyond tolerance."""


class ConvergenceError(FareyPhaseError, RuntimeError):
    """An iterative solver ran out of iterations before reaching tolerance."""

    def __init__(self, message: str, last_residual: float = float("nan")):
        super().__init__(message)
        self.last_residual = last_residual


class TruncationError(FareyPhaseError, RuntimeError):
    """Matrix truncation uncertainty too large for the requested quantity."""

    def __init__(self, message: str, required_dim: int = -1):
        super().__init__(message)
        self.required_dim = required_dim
