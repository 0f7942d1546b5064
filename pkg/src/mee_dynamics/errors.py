"""Exception types raised across the package."""


class MeeError(Exception):
    """Base class for all package errors."""


class NotHermitian(MeeError, ValueError):
    pass


class NotNormalized(MeeError, ValueError):
    pass


class InvalidState(MeeError, ValueError):
    """Density matrix fails Hermiticity, trace or positivity checks."""


class NotXForm(MeeError, ValueError):
    """Correlation tensor does not follow the symmetric X pattern."""


class Unphysical(MeeError, ValueError):
    """Parameters describe a matrix that is not positive semidefinite."""


class SingularFilter(MeeError, ValueError):
    pass


class ZeroSuccessProbability(MeeError, ValueError):
    pass


class SingularBoost(MeeError, ValueError):
    pass


class DegenerateC(MeeError, ValueError):
    """Optimal boost undefined because ``1 + c <= 0`` with ``d != 0``."""


class NonPositiveDenominator(MeeError, ArithmeticError):
    pass


class BoostCapExceeded(MeeError, ValueError):
    pass


class NoConvergence(MeeError, RuntimeError):
    pass


class NegativeTime(MeeError, ValueError):
    pass


class NonPositiveN(MeeError, ValueError):
    pass


class StepTooLarge(MeeError, ValueError):
    pass


class PhysicalityLost(MeeError, RuntimeError):
    """Integrated state drifted outside the physical set."""


class InvalidConfig(MeeError, ValueError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
