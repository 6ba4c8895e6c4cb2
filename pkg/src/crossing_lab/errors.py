"""Exception hierarchy shared by the library and the command line."""


class CrossingLabError(Exception):
    """Base class; ``category`` is used in CLI error lines."""

    category = "error"


class DomainError(CrossingLabError, ValueError):
    """An argument lies outside the domain of an operation."""

    category = "domain"


class BracketError(DomainError):
    """The bracket handed to the root finder holds no sign change."""


class SingularReductionError(DomainError):
    """A vanishing coupling leaves no dimensionless form."""


class InsufficientDataError(DomainError):
    category = "data"


class DivergenceError(CrossingLabError, ArithmeticError):
    """Integration produced a non-finite state."""

    category = "divergence"

    def __init__(self, s):
        self.s = s
        super().__init__(f"non-finite amplitude at s={s!r}")
