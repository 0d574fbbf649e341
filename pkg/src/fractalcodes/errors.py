"""Exception hierarchy shared by every module."""


class FractalCodesError(Exception):
    """Base class for library errors."""


class StructuralError(FractalCodesError, ValueError):
    """Operands do not share a field, variable count or shape."""


class DomainError(FractalCodesError, ValueError):
    """An operation was asked for outside the set where it is defined."""


class PreconditionError(FractalCodesError, ValueError):
    """A documented precondition of an operation does not hold."""


class UnsupportedOperatorError(FractalCodesError, ValueError):
    """The operator is not purely X-type or purely Z-type."""


class BudgetExceeded(FractalCodesError, RuntimeError):
    """An exhaustive search would exceed its candidate budget."""

    def __init__(self, message, candidates=None, budget=None, partial=None):
        super().__init__(message)
        self.candidates = candidates
        self.budget = budget
        self.partial = partial
