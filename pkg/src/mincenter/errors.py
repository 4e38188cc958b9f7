"""Exception hierarchy shared by all modules."""


class MinCenterError(Exception):
    """Base class for every error raised by the package."""


class InvalidArgumentError(MinCenterError, ValueError):
    pass


class DimensionMismatchError(MinCenterError, ValueError):
    pass


class UnsupportedOperationError(MinCenterError):
    pass


class NumericOverflowError(MinCenterError, ArithmeticError):
    """A state component became non-finite.  ``index`` is the failing sample."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class OrbitExhaustedError(MinCenterError):
    """A finite symbolic sequence ran out of symbols."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NotLagrangeStableError(MinCenterError):
    """The orbit left the bounded region it was required to stay in."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class BudgetExceededError(MinCenterError):
    pass


class DegenerateEstimateError(MinCenterError):
    pass


class ConfigError(MinCenterError):
    """Configuration parse or validation failure, with location if known."""

    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.field = field
