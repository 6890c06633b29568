"""Exception types shared across the package."""


class LaxflowError(Exception):
    """Base class for every error raised by this package."""


class SingularConfiguration(LaxflowError):
    """A potential denominator fell below the separation floor.

    Repulsive inverse-square dynamics never reaches a collision along an
    exact trajectory, so crossing the floor always signals numerical
    failure rather than physics.
    """


class UnsupportedModel(LaxflowError):
    """Lax machinery requested for a model outside the supported case."""

    DEFAULT_MESSAGE = "Lax machinery unsupported for this model"

    def __init__(self, message: str | None = None):
        super().__init__(message or self.DEFAULT_MESSAGE)


class DimensionMismatch(LaxflowError):
    """Operands have incompatible shapes or lengths."""


class BadOrder(LaxflowError):
    """Requested trace order is outside the permitted range."""


class DegenerateSpectrum(LaxflowError):
    """An eigenvalue gap is too small for a well-conditioned result."""


class EigenFailure(LaxflowError):
    """The eigensolver did not converge."""


class SpanTooShort(LaxflowError):
    """The trajectory does not cover the time span a check requires."""


class NonFinite(LaxflowError):
    """A coordinate left the finite floating-point range."""


class ConfigError(LaxflowError):
    """A run configuration is malformed or inconsistent."""
