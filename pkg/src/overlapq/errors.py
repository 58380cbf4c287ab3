"""Exception types raised across the package."""


class OverlapError(Exception):
    """Base class for package errors."""


class DomainError(OverlapError, ValueError):
    """An argument lies outside the domain of an operation."""


class ModelSpecError(OverlapError, ValueError):
    """A model/query description is malformed.

    ``field`` is the dotted path of the offending entry, e.g. ``service.rate``.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class UnsupportedCombination(OverlapError):
    """No evaluation path exists for the requested (model, query, method)."""


class QuadratureError(OverlapError, ArithmeticError):
    """Adaptive quadrature hit its subdivision limit.

    Carries the best estimate and the achieved error bound.
    """

    def __init__(self, message, estimate, error):
        self.estimate = estimate
        self.error = error
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
