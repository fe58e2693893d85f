class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NumericError(ArithmeticError):
    """Base class for failures of a numerical routine."""


class ConsistencyError(NumericError):
    """A quantity that must be nonnegative (or bounded) came out badly wrong."""


class UnreachableTargetError(NumericError):
    """No gain can reach the requested heterophily."""


class EigensolverCapError(ValueError):
    """Dense eigendecomposition refused because the graph is too large."""
