"""Exception types shared across the package."""


class MulfixError(ValueError):
    """Base class for every library-specific error."""


class DomainError(MulfixError):
    """A point, parameter, or map evaluation is outside its valid domain."""


class DegeneratePairError(MulfixError):
    """An operation that needs distinct points received an equal pair."""


class ConfigError(MulfixError):
    """An experiment configuration failed validation."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(message if field is None else f"{field}: {message}")


class DomainEscapeError(MulfixError):
    """The iteration produced a point outside the declared domain."""

    def __init__(self, message: str, point=None, iteration: int | None = None):
        self.point = point
        self.iteration = iteration
        super().__init__(message)


class MonotoneResidualError(MulfixError):
    """Successive step distances grew while still above tolerance."""
