class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


class InfeasibleModelError(DomainError):
    """Raised when a mixture model assigns zero density to an observation."""
