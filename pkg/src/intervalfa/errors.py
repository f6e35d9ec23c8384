"""Exception hierarchy shared by every module of the package."""


class IntervalFAError(Exception):
    """Base class for all package errors."""


class InvalidIntervalError(IntervalFAError, ValueError):
    """An observation violates ``lower <= mode <= upper`` or is not finite."""


class DomainError(IntervalFAError, ValueError):
    """An argument lies outside the domain of an operation."""


class ModelError(IntervalFAError, ValueError):
    """The distribution model cannot be applied to the given data."""


class DegenerateVariableError(IntervalFAError, ValueError):
    """A variable has zero symbolic variance."""

    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"variable {column!r} has zero sample variance")


class NumericalError(IntervalFAError, ArithmeticError):
    """A matrix computation failed (singular, not positive definite, ...)."""


class GenerationError(IntervalFAError, RuntimeError):
    """A synthetic correlation matrix could not be produced."""


class InputFormatError(IntervalFAError, ValueError):
    """Malformed CSV input; carries the offending row/column when known."""

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
