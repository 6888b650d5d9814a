"""Exception types raised by the numerics."""


class NhxyError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateModeError(NhxyError, ValueError):
    """A momentum mode sits on an exceptional point (w = 0)."""

    def __init__(self, k, message=None):
        self.k = k
        super().__init__(message or f"mode k={k!r} is degenerate (exceptional point, w=0)")


class QuadratureError(NhxyError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate):
        self.estimate = estimate
        super().__init__(f"{message} (achieved error estimate {estimate:.3e})")


class TableRangeError(NhxyError, IndexError):
    """A contraction table does not cover the requested separations."""


class PairingError(NhxyError):
    """Eigenvalues of a Majorana correlation matrix failed to pair as +/- nu."""


class ConvergenceError(NhxyError):
    """An iterative refinement exhausted its budget."""


class NearDegenerateError(NhxyError):
    """Exact diagonalization found no unique lowest-real-part eigenvalue."""


class FitError(NhxyError, ValueError):
    """Input data cannot be fitted (non-positive values, too few points)."""
