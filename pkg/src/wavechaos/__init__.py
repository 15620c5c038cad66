"""Moment asymptotics and chaos expansions for the stochastic wave equation
with time-independent Gaussian noise."""
from .errors import (ConfigurationError, CriticalityError, DomainError, PreconditionError,
                     UnsupportedFamilyError, WaveChaosError)
from .kernels import NoiseSpec, WaveKernel

__version__ = "0.1.0"

__all__ = [
    "NoiseSpec",
    "WaveKernel",
    "WaveChaosError",
    "DomainError",
    "UnsupportedFamilyError",
    "ConfigurationError",
    "PreconditionError",
    "CriticalityError",
]
