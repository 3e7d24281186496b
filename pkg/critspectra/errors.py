"""Exception hierarchy mapped onto process exit codes."""

from critspectra.constants import (
    EXIT_CONFIG_ERROR,
    EXIT_NUMERICAL_ERROR,
    EXIT_PRECONDITION_ERROR,
)


class CritSpectraError(Exception):
    """Base error carrying the exit code the CLI reports for it."""

    exit_code = EXIT_NUMERICAL_ERROR

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class ConfigError(CritSpectraError):
    """Malformed or incomplete run configuration."""

    exit_code = EXIT_CONFIG_ERROR

    def __init__(
        self,
        message: str,
        *,
        field: str | None = None,
        section: str | None = None,
        line: int | None = None,
    ):
        self.field = field
        self.section = section
        self.line = line
        location = []
        if section:
            location.append(f"section [{section}]")
        if field:
            location.append(f"field '{field}'")
        if line is not None:
            location.append(f"line {line}")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class PreconditionError(CritSpectraError):
    """An operation was called outside its documented preconditions."""

    exit_code = EXIT_PRECONDITION_ERROR


class DomainError(PreconditionError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class CapacityError(PreconditionError):
    """Requested sizes exceed the configured memory ceiling."""

    def __init__(self, requested_bytes: int, limit_bytes: int):
        self.requested_bytes = requested_bytes
        self.limit_bytes = limit_bytes
        super().__init__(
            f"requested {requested_bytes} bytes exceeds the capacity limit of {limit_bytes} bytes"
        )

    def __reduce__(self):
        return (type(self), (self.requested_bytes, self.limit_bytes))


class InsufficientDataError(PreconditionError):
    """Not enough samples to estimate the requested quantity."""


class NumericalError(CritSpectraError):
    """A numerical invariant failed or a computation did not converge."""

    exit_code = EXIT_NUMERICAL_ERROR


class FitError(NumericalError):
    """A fit could not be carried out on the given data."""


class PipelineError(CritSpectraError):
    """Failure inside one (L, seed) run of a multi-run study."""

    def __init__(self, lattice_size: int, seed: int, cause: CritSpectraError):
        self.lattice_size = lattice_size
        self.seed = seed
        self.cause = cause
        self.exit_code = cause.exit_code
        super().__init__(f"run L={lattice_size} seed={seed} failed: {cause.message}")

    def __reduce__(self):
        return (type(self), (self.lattice_size, self.seed, self.cause))
