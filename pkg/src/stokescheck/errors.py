"""Exception hierarchy shared across the toolkit."""


class StokesCheckError(Exception):
    """Base class for all toolkit errors."""


class DomainError(StokesCheckError):
    """A surface map or one-form was evaluated outside its evaluable neighborhood."""


class FieldDomainError(StokesCheckError):
    """An image-space vector field was evaluated where its guard fails."""


class EvaluationError(StokesCheckError):
    """An integrand produced a non-finite value."""


class ParameterError(StokesCheckError):
    """An operation or scenario received an out-of-range parameter."""
