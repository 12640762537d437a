"""Exception types shared across the package."""


class NullConeError(Exception):
    """Base class for library errors."""


class ZeroTensorError(NullConeError, ValueError):
    pass


class SingularMarginalError(NullConeError, ArithmeticError):
    """A floating marginal is numerically singular."""


class InconclusiveError(NullConeError):
    """The scaling loop ran out of budget without a certified verdict."""


class ResourceError(NullConeError, MemoryError):
    """A combinatorial or memory budget would be exceeded."""
