"""Exception hierarchy shared by all modules."""


class MonopoleError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MonopoleError, ValueError):
    """An angle or coordinate lies outside the range an operation accepts."""


class SectorMismatchError(MonopoleError, ValueError):
    """A winding sector does not satisfy m_N + m_S = CN for the given gauge."""


class ConvergenceError(MonopoleError, RuntimeError):
    """The eigensolver could not reach the requested tolerance.

    Attributes
    ----------
    index : int
        Position of the offending eigenpair in ascending order.
    iterations : int
        Iterations spent before giving up.
    residual : float
        Last residual norm ``||(T - lam) v||``.
    """

    def __init__(self, message, index=-1, iterations=0, residual=float("nan")):
        super().__init__(message)
        self.index = index
        self.iterations = iterations
        self.residual = residual

    def diagnostics(self):
        return {"index": self.index, "iterations": self.iterations,
                "residual": self.residual}


class AmbiguousWindingError(MonopoleError, RuntimeError):
    """Phase sum around a loop is not close enough to an integer."""


class RootBracketError(MonopoleError, RuntimeError):
    """The vortex-location equation has no sign change on [-1, 1]."""
