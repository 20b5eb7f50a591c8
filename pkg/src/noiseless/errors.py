"""Error hierarchy; every error carries the CLI exit code it maps to."""


class NoiselessError(ValueError):
    """Base class for all domain errors."""

    exit_code = 5


class ConfigParseError(NoiselessError):
    """The config file could not be read or parsed."""

    exit_code = 2


class ConfigSchemaError(NoiselessError):
    """The config parsed but does not match the published schema."""

    exit_code = 3


class InvariantError(NoiselessError):
    """A domain invariant is violated."""

    exit_code = 4

    def __init__(self, message: str, field: str | None = None) -> None:
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class InsufficientMomentsError(NoiselessError):
    """A moments-only record lacks a moment the requested bound needs."""


class PreconditionError(NoiselessError):
    """A bound's hypotheses do not hold for the given parameters."""

    def __init__(self, message: str, minimal_delta: float | None = None) -> None:
        self.minimal_delta = minimal_delta
        super().__init__(message)


class NoUncertaintyError(NoiselessError):
    """The data carries no randomness from the adversary's point of view."""


class OracleCapacityError(NoiselessError):
    """The exact oracle would exceed its support cap."""


class OracleUnsupportedError(NoiselessError):
    """The instance cannot be handled by the requested oracle."""


class DeltaNotImprovableError(NoiselessError):
    """A target delta below the theorem delta was requested."""
