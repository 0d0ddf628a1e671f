"""Shared oracles for the test suite."""

from __future__ import annotations

import math

from cvteleport.units import BOLTZMANN, PLANCK


def temperature_for_noise_factor(W: float, frequency: float = 5e9) -> float:
    """Bath temperature whose noise factor ``2n + 1`` equals ``W``."""
    if W <= 1:
        return 0.0
    n = (W - 1) / 2
    return PLANCK * frequency / (BOLTZMANN * math.log1p(1 / n))


def large_gain_fidelity(r: float, eta: float, eps_ff: float, W_ff: float) -> float:
    """Matched, lossless-entanglement, G -> inf fidelity written out by hand."""
    return 1.0 / (1.0 + math.exp(-2 * r) + eta * eps_ff * W_ff / 2)
