"""Exception hierarchy shared across the package."""


class ApproxTreeError(Exception):
    """Base class for all package errors."""


class InputError(ApproxTreeError):
    """Bad user input: missing files, malformed data, invalid config."""


class InternalError(ApproxTreeError):
    """An internal invariant was violated; indicates a bug, not bad input."""
