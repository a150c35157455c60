"""Exception and warning types shared across the package."""


class QHDError(Exception):
    """Base class for all package errors."""


class ConfigurationError(QHDError, ValueError):
    """Invalid construction parameters (basis window, experiment config, ...)."""


class DomainError(QHDError, ValueError):
    """Inputs live on incompatible domains (e.g. curve parameter intervals)."""


class IntegrationError(QHDError, RuntimeError):
    """An ODE or quadrature routine failed to reach its tolerance."""


class InsufficientPrecisionError(QHDError, RuntimeError):
    """Monte Carlo noise dominates the quantity being estimated."""


class QHDWarning(UserWarning):
    pass


class TruncationWarning(QHDWarning):
    pass


class OutOfRegimeWarning(QHDWarning):
    pass


class IllConditionedFrameWarning(QHDWarning):
    pass


class EnvelopeWarning(QHDWarning):
    pass


class SampleSizeWarning(QHDWarning):
    pass
