"""Exception hierarchy shared by all subpackages."""


class MskError(Exception):
    """Base class for library errors."""


class DomainError(MskError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidationError(MskError, ValueError):
    """An input object violates a structural invariant (shape, symmetry, finiteness)."""


class ImmersionError(MskError):
    """A chart fails to be an immersion at some point."""


class IntegrationError(MskError):
    """A quadrature integrand produced a non-finite value."""


class PreconditionError(MskError):
    """A geometric hypothesis (cone condition, support condition) does not hold."""
