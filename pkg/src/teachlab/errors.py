"""Exception types shared across the package."""


class TeachlabError(Exception):
    """Base class for errors raised by teachlab."""


class DomainMismatchError(TeachlabError, ValueError):
    """A point id or concept index does not belong to the class."""


class PreconditionError(TeachlabError, ValueError):
    """An operation was called on an input outside its contract."""


class ConstructionError(TeachlabError):
    """A generated class failed one of its own structural checks."""


class BudgetExceeded(TeachlabError):
    """A computation was refused because its estimated cost is too large.

    ``estimate`` and ``budget`` are in the same unit as the refusing check
    (bit-operations for scans, concepts for materialization, bytes for dense
    matrices). ``analytic`` optionally carries exact sizes computed instead.
    """

    def __init__(self, message, *, estimate=None, budget=None, analytic=None):
        super().__init__(message)
        self.estimate = estimate
        self.budget = budget
        self.analytic = analytic
