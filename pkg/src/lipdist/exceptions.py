"""Exception hierarchy used across the package."""


class LipdistError(Exception):
    """Base class for all errors raised by lipdist."""


class InvalidInputError(LipdistError, ValueError):
    """Input violates an operation's precondition."""


class NearBoundaryError(InvalidInputError):
    """A point is too close to the domain boundary for the requested weight."""


class EvaluationError(LipdistError, ArithmeticError):
    """A user-supplied function produced a non-finite value."""


class ConvergenceError(LipdistError, RuntimeError):
    """An iterative procedure ran out of budget.

    The last two iterates are kept on the exception so callers can decide
    whether the partial answer is usable.
    """

    def __init__(self, message, previous=None, last=None):
        super().__init__(message)
        self.previous = previous
        self.last = last


class NoPathError(LipdistError, RuntimeError):
    """Two grid nodes lie in different connected components."""


class MajorantDegeneracyError(LipdistError, ValueError):
    """The majorant vanished at a positive distance."""


class PreconditionError(LipdistError, ValueError):
    """A theorem check was called without its required certificate."""


class ConfigError(LipdistError, ValueError):
    """Suite configuration is malformed; carries the offending key."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
