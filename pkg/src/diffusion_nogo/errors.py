"""Exception hierarchy shared by every module."""


class NogoError(Exception):
    """Base class for all errors raised by this package."""


class InputError(NogoError, ValueError):
    """Malformed classical input (bitstring length, non-square n, bad hex)."""


class ShapeError(NogoError, ValueError):
    """Two states or operators live on incompatible register layouts."""


class CapacityError(NogoError, MemoryError):
    """A register would exceed the configured amplitude budget."""


class PreconditionError(NogoError, ValueError):
    """An operation was called outside its documented domain."""
