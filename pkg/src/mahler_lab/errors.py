"""Exception hierarchy shared by every module."""


class MahlerLabError(Exception):
    """Base class for all library errors."""


class ArgumentError(MahlerLabError, ValueError):
    """An input violates an operation's precondition."""


class RootFindingError(MahlerLabError, ArithmeticError):
    """Simultaneous iteration did not reach the requested residual.

    The best iterate and its residual are kept so callers can decide
    whether the approximation is still usable.
    """

    def __init__(self, message, best=None, residual=None, iterations=None):
        super().__init__(message)
        self.best = best
        self.residual = residual
        self.iterations = iterations


class InconclusiveError(MahlerLabError):
    """A decision procedure hit a configured cap before deciding."""


class IllConditionedError(MahlerLabError, ArithmeticError):
    """A rank decision is too close to its threshold to be trusted."""

    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap


class RootOfUnityError(MahlerLabError, ArithmeticError):
    """A Pierce sequence contains a zero term."""


class SearchTooLargeError(MahlerLabError):
    """The requested enumeration exceeds the configured cardinality cap."""

    def __init__(self, message, cardinality):
        super().__init__(message)
        self.cardinality = cardinality


class ParseError(MahlerLabError, ValueError):
    """Polynomial text that does not match either accepted grammar."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position
