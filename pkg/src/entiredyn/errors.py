"""Exception types raised across the package."""


class EntireDynError(Exception):
    """Base class for all package errors."""


class Overflow(EntireDynError, ArithmeticError):
    def __init__(self, z, value=None):
        self.z = z
        self.value = value
        super().__init__(f"|f(z)| exceeds the floating range at z={z!r}")


class BoundaryZero(EntireDynError):
    """A zero of f' lies on (or within tolerance of) the search box boundary."""


class CountMismatch(EntireDynError):
    """Located critical points disagree with the argument-principle count."""


class NoCycleFound(EntireDynError):
    pass


class TrapConstructionFailed(EntireDynError):
    pass


class Inconclusive(EntireDynError):
    pass


class NotHyperbolic(EntireDynError):
    pass


class SignPatternViolation(EntireDynError, ValueError):
    pass


class EmptySupport(EntireDynError, ValueError):
    pass


class NonConvergence(EntireDynError):
    def __init__(self, msg, residual=None, iterate=None):
        super().__init__(msg)
        self.residual = residual
        self.iterate = iterate


class QuadratureAccuracyLoss(EntireDynError):
    pass


class BracketFailure(EntireDynError):
    pass
