"""Exception hierarchy shared by every module of the package."""


class AcmziError(Exception):
    """Base class for all package errors."""


class InvalidConfigError(AcmziError, ValueError):
    pass


class InvalidLossError(AcmziError, ValueError):
    pass


class InvalidGainError(AcmziError, ValueError):
    pass


class InvalidSplitError(AcmziError, ValueError):
    pass


class DimensionMismatchError(AcmziError, ValueError):
    pass


class UnknownObservableError(AcmziError, TypeError):
    pass


class UnsupportedPhaseConfigError(AcmziError, ValueError):
    """Closed-form detection formulas only hold at theta1 = 0, theta2 = pi."""


class ZeroSlopeError(AcmziError, ArithmeticError):
    """Signal slope vanishes, so the error-propagation sensitivity diverges."""


class NoValidGainError(AcmziError, ValueError):
    pass


class AllDivergentError(AcmziError, ArithmeticError):
    pass


class NonpositiveFisherError(AcmziError, ValueError):
    pass


class ZeroPhotonsError(AcmziError, ValueError):
    pass


class TruncationOverflowError(AcmziError, RuntimeError):
    pass


class UnnormalizedStateError(AcmziError, ValueError):
    pass
