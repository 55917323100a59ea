"""Exception hierarchy shared by the solvers, the engine and the CLI."""


class PooledStepError(Exception):
    """Base class for every error raised by this package."""


class DomainError(PooledStepError, ValueError):
    """An input lies outside the set on which an operation is defined."""


class DryStateError(DomainError):
    """A state with (numerically) zero depth was passed to a wet-only operation."""


class VacuumError(PooledStepError):
    """The wave curves of a Riemann problem do not meet at positive depth."""


class NumericalFailure(PooledStepError, RuntimeError):
    """An iterative solve did not converge or lost its bracket."""


class PositivityError(NumericalFailure):
    """A finite-volume update produced a non-positive depth."""

    def __init__(self, message, time=None, canal=None, cell=None):
        super().__init__(message)
        self.time = time
        self.canal = canal
        self.cell = cell


class ConfigError(PooledStepError, ValueError):
    """A scenario configuration failed validation."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field
