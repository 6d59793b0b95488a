"""Exception hierarchy shared by all modules."""


class LsboundError(Exception):
    """Base class for every error raised by the package."""


class DomainError(LsboundError, ValueError):
    """An argument lies outside the domain of the requested quantity."""


class GridError(LsboundError):
    """The quadrature grid cannot resolve the requested function."""


class UnsupportedSpaceError(LsboundError):
    """No covering rule exists for the given parameter space."""


class PreconditionError(LsboundError):
    """A stated hypothesis of a bound does not hold for the given inputs."""

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


class DivergenceError(LsboundError):
    """A series did not converge within the truncation budget."""


class RegimeError(LsboundError):
    """The requested variant does not exist in the current s regime."""


class ConfigError(LsboundError):
    """Invalid or incomplete configuration."""
