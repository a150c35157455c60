"""Numerical toolkit for quantum holonomy-diffeomorphism states of gauge fields on flat tori."""
from .errors import (
    ConfigurationError,
    DomainError,
    EnvelopeWarning,
    IllConditionedFrameWarning,
    InsufficientPrecisionError,
    IntegrationError,
    OutOfRegimeWarning,
    QHDError,
    QHDWarning,
    SampleSizeWarning,
    TruncationWarning,
)
from .kernels import BACKEND

__version__ = "0.1.0"
