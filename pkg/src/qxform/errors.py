"""Exception hierarchy.

Two families matter to callers: ``ValueError`` subclasses signal bad input
(the CLI maps them to exit status 2) and ``NumericalError`` subclasses signal
a computation that cannot be completed (exit status 3).
"""


class NumericalError(RuntimeError):
    """A well-posed request whose numerics failed."""


class OutOfDomainError(ValueError):
    def __init__(self, t, lo, hi, what="time"):
        self.t = t
        self.lo = lo
        self.hi = hi
        super().__init__(f"{what} {t!r} outside domain [{lo!r}, {hi!r}]")


class NotInvertibleError(NumericalError):
    """Derivative of a map vanishes or changes sign."""

    def __init__(self, message, t=None):
        self.t = t
        super().__init__(message)


class FiniteEscapeError(NumericalError):
    """Riccati solution left the configured bound before the end of the grid."""

    def __init__(self, t_escape, bound):
        self.t_escape = t_escape
        self.bound = bound
        super().__init__(f"gauge solution escaped |kappa| > {bound:g} at t = {t_escape!r}")


class InvalidGaugeError(NumericalError):
    def __init__(self, residual, tol):
        self.residual = residual
        self.tol = tol
        super().__init__(f"gauge residual {residual:.3e} exceeds tolerance {tol:.1e}")


class BoundaryError(NumericalError):
    """Wavefunction amplitude reached the edge of the spatial grid."""


class GridMismatchError(ValueError):
    pass
