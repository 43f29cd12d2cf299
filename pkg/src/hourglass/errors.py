"""Exception types shared across the package."""


class HourglassError(Exception):
    """Base class for all errors raised by this package."""


class InputError(HourglassError):
    """Bad user input: malformed files, out-of-range parameters, unusable graphs."""


class InvariantError(HourglassError):
    """An internal consistency check failed; this indicates a bug, not bad input."""
