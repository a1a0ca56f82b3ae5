"""Exception taxonomy shared by all sitoform modules."""


class SitoformError(Exception):
    """Base class for all library errors."""


class InputError(SitoformError):
    """Malformed or inconsistent input data (maps to CLI exit code 2)."""


class PreconditionError(SitoformError):
    """A documented precondition of an operation does not hold."""


class ResourceLimitError(SitoformError):
    """A configurable combinatorial cap was exceeded."""


class InvariantViolation(SitoformError):
    """Internal consistency check failed; indicates corrupt input structures."""
