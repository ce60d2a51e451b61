"""Exception types shared across the package."""


class DataError(ValueError):
    """Raised when an input file or dataset cannot be parsed or validated."""


class NumericalError(RuntimeError):
    """Raised when an iterative routine produces non-finite values.

    ``sweep`` carries the iteration index at which the failure was detected,
    when known.
    """

    def __init__(self, message, sweep=None):
        super().__init__(message)
        self.sweep = sweep


class CapacityError(ValueError):
    """Raised when an exact-enumeration routine is asked to exceed its size bound."""
