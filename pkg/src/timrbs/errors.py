"""Exception types raised across the package."""


class TimrbsError(Exception):
    """Base class for all package errors."""


class ConfigurationError(TimrbsError, ValueError):
    """Invalid geometry, grid or scenario parameters.

    ``key_path`` names the offending entry when the error comes from a
    scenario file (e.g. ``"layout.R2"``).
    """

    def __init__(self, message, key_path=None):
        self.key_path = key_path
        self.reason = message
        if key_path:
            message = f"{key_path}: {message}"
        super().__init__(message)


class UndefinedMetricError(TimrbsError, ValueError):
    """A metric was requested on a field or log where it has no meaning."""


class MethodError(TimrbsError, ValueError):
    """A propagation method was requested outside its sampling regime."""

    def __init__(self, message, admissible=None):
        self.admissible = admissible
        super().__init__(message)


class GridMismatchError(TimrbsError, ValueError):
    """Two fields sampled on different grids were combined."""


class ModelDomainError(TimrbsError, ArithmeticError):
    """A closed-form power model was evaluated outside its domain."""


class SolverError(TimrbsError, RuntimeError):
    """A root finder could not bracket or resolve a solution."""
