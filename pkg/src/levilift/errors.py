"""Exception hierarchy shared by every module."""


class LeviLiftError(Exception):
    """Base class for all package errors."""


class InputError(LeviLiftError):
    """Malformed or inconsistent input data."""


class PrecisionError(LeviLiftError):
    """An answer cannot be decided from the stored digits."""


class PreconditionError(LeviLiftError):
    """An operation was called outside its domain of validity."""


class LinearRegimeError(PreconditionError):
    """A character was evaluated below half its depth."""


class InternalError(LeviLiftError):
    """An invariant that should be guaranteed by construction failed."""
