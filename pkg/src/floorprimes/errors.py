"""Exception hierarchy shared by every module."""


class FloorPrimesError(Exception):
    """Base class for all library errors."""


class DomainError(FloorPrimesError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class RangeError(DomainError):
    """An argument exceeds a table or budget limit (e.g. beyond the sieve)."""


class PreconditionError(FloorPrimesError):
    """A documented precondition does not hold (e.g. sieve too small for a tolerance)."""


class InsufficientDataError(FloorPrimesError):
    """Not enough usable records to perform a fit."""


class ResourceError(FloorPrimesError):
    """Allocation or I/O failure."""
