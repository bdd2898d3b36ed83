"""Exception types shared by every module."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class ConfigurationError(ValueError):
    """A run was configured inconsistently (unknown letter, bad shape, ...)."""


class SingularityError(ArithmeticError):
    """A determinant that must stay away from zero became numerically singular."""


class ConvergenceError(ArithmeticError):
    """An iterative method did not reach its tolerance within its budget."""
