class StlabError(Exception):
    """Base class for all errors raised by stlab."""


class ResourceLimitError(StlabError):
    pass


class BudgetExceededError(StlabError):
    pass


class ThresholdExceededError(StlabError):
    pass


class InconsistencyError(StlabError):
    """Raised when point counting cannot isolate a unique group order.

    This indicates an arithmetic bug, never bad input.
    """


class CacheCorruptionError(StlabError):
    pass


class DomainError(StlabError, ValueError):
    pass


class InsufficientLengthError(StlabError):
    pass


class ZeroReferenceError(StlabError):
    pass


class UnknownNameError(StlabError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ConvergenceError(StlabError):
    pass


class SizeError(StlabError):
    pass


class InvalidFigureError(StlabError):
    pass
