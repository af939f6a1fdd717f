"""Exception types shared across the package."""


class GroupMismatchError(ValueError):
    """Operands belong to different value-group variants (or primes)."""


class PrecisionError(ArithmeticError):
    """An operation ran out of p-adic or exponent precision."""


class TableCapError(RuntimeError):
    """A Witt polynomial table beyond the configured level cap was requested."""


class ZeroSeriesError(ZeroDivisionError):
    """Division or inversion of a series that is zero at its precision."""


class UnsupportedFormError(ValueError):
    """Input is outside the structured family an algorithm supports."""


class NotAFactorizationError(ValueError):
    """A claimed factorization does not reproduce the target element."""
