"""Rydberg-atom quantum radar receiver simulator.

Models the atomic optical gain, radar link budget, APD noise, the sampled
superheterodyne beat record and Doppler (speed) estimation, and compares the
Rydberg receiver with a classical dipole-antenna receiver.
"""

from .constants import CONSTANTS, PhysicalConstants
from .errors import ConfigError, DomainError, ModelValidityError, NoSignalError

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS",
    "PhysicalConstants",
    "ConfigError",
    "DomainError",
    "ModelValidityError",
    "NoSignalError",
]
