"""Unit conversions and thermal bath occupations.

All loss, gain, coupling and squeezing values enter the package in dB at the
user-facing boundary and are converted here once; the rest of the code works
with linear quantities only.

Conventions
-----------
* squeezing level ``S`` (dB) -> squeeze factor ``r = S ln(10) / 20``
* gain / coupling (dB) -> power ratio ``10**(x / 10)``
* loss (dB, positive) -> lost power fraction ``1 - 10**(-x / 10)``
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError

# CODATA 2018 (exact SI values)
PLANCK = 6.62607015e-34  # J s
BOLTZMANN = 1.380649e-23  # J / K

__all__ = [
    "ChannelSpec",
    "thermal_occupation",
    "noise_factor",
    "squeeze_factor_from_db",
    "db_from_squeeze_factor",
    "gain_from_db",
    "db_from_gain",
    "coupling_from_db",
    "loss_from_db",
    "db_from_loss",
]


def thermal_occupation(temperature: float, frequency: float) -> float:
    """Bose-Einstein occupation of a bath mode.

    Parameters
    ----------
    temperature : float
        Bath temperature in kelvin.
    frequency : float
        Carrier frequency ``omega / 2 pi`` in hertz.

    Returns
    -------
    float
        Mean photon number ``1 / (exp(h f / k_B T) - 1)``; exactly 0 at T = 0.
    """
    if frequency <= 0:
        raise ConfigError(f"frequency must be positive, got {frequency}")
    if temperature < 0:
        raise ConfigError(f"temperature must be non-negative, got {temperature}")
    if temperature == 0:
        return 0.0
    # dividing by T last keeps denormal temperatures from underflowing k_B T
    x = PLANCK * frequency / BOLTZMANN / temperature
    if x > 700:
        return 0.0
    return 1.0 / math.expm1(x)


def noise_factor(temperature: float, frequency: float) -> float:
    """Thermal noise factor ``W = 2 n + 1`` of a bath (vacuum gives 1)."""
    return 2.0 * thermal_occupation(temperature, frequency) + 1.0


def squeeze_factor_from_db(squeezing_db: float) -> float:
    if squeezing_db < 0:
        raise ConfigError(f"squeezing level must be >= 0 dB, got {squeezing_db}")
    return squeezing_db * math.log(10.0) / 20.0


def db_from_squeeze_factor(r: float) -> float:
    return 20.0 * r / math.log(10.0)


def gain_from_db(gain_db: float) -> float:
    return 10.0 ** (gain_db / 10.0)


def db_from_gain(gain: float) -> float:
    return 10.0 * math.log10(gain)


def coupling_from_db(coupling_db: float) -> float:
    """Coupler power ratio from dB (``-20 dB`` -> ``0.01``)."""
    return 10.0 ** (coupling_db / 10.0)


def loss_from_db(loss_db: float) -> float:
    """Lost power fraction for an attenuation of ``loss_db`` (>= 0)."""
    if loss_db < 0:
        raise ConfigError(f"loss must be >= 0 dB, got {loss_db}")
    return -math.expm1(-loss_db * math.log(10.0) / 10.0)


def db_from_loss(loss: float) -> float:
    if not 0.0 <= loss < 1.0:
        raise ConfigError(f"loss fraction must lie in [0, 1), got {loss}")
    return -10.0 * math.log1p(-loss) / math.log(10.0)


@dataclass(frozen=True)
class ChannelSpec:
    """A lossy thermal channel: lost power fraction, bath temperature, carrier."""

    loss: float
    temperature: float = 0.0
    frequency: float = 5e9

    def __post_init__(self):
        if not 0.0 <= self.loss <= 1.0:
            raise ConfigError(f"loss must lie in [0, 1], got {self.loss}")
        if self.temperature < 0:
            raise ConfigError(f"temperature must be >= 0, got {self.temperature}")
        if self.frequency <= 0:
            raise ConfigError(f"frequency must be > 0, got {self.frequency}")

    @property
    def occupation(self) -> float:
        return thermal_occupation(self.temperature, self.frequency)

    @property
    def noise_factor(self) -> float:
        return 2.0 * self.occupation + 1.0
