"""Exception types raised across the package."""


class IsingScreenError(Exception):
    """Base class for all package errors."""


class NonSymmetricError(IsingScreenError, ValueError):
    pass


class NonzeroDiagonalError(IsingScreenError, ValueError):
    pass


class DimensionMismatchError(IsingScreenError, ValueError):
    pass


class BadDimensionError(IsingScreenError, ValueError):
    pass


class TooLargeError(IsingScreenError, ValueError):
    """Requested exact enumeration exceeds the configured cap."""


class BadProbabilityError(IsingScreenError, ValueError):
    pass


class EmptyInputError(IsingScreenError, ValueError):
    pass


class WrongChannelError(IsingScreenError, ValueError):
    """Data came from a corruption channel the operation does not accept."""


class NormExceededError(IsingScreenError, ValueError):
    pass


class ThetaTooLargeError(IsingScreenError, ValueError):
    """The binomial TV bound is vacuous (theta >= 1)."""


class GradientBoundViolated(IsingScreenError, RuntimeError):
    """An oracle returned a gradient with sup-norm above the declared cap."""


class NonFiniteError(IsingScreenError, FloatingPointError):
    pass


class StreamExhaustedError(IsingScreenError, RuntimeError):
    pass


class FileFormatError(IsingScreenError, ValueError):
    pass
