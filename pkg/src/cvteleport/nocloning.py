"""No-cloning fidelity thresholds for finite-energy codebooks.

The eavesdropper is modelled as an entangling cloner with amplification
``A >= 1``; its clone of ``|alpha>`` has fidelity

    F(alpha, A) = 2 / (1 + A) * exp[-2 (1 - sqrt(A/2))^2 |alpha|^2 / (1 + A)].

The threshold of a codebook is the codebook-averaged fidelity maximised over
``A``. Because ``F`` is exponential in ``x = |alpha|^2`` the average reduces to
the Laplace transform of the photon-number distribution, which each codebook
evaluates exactly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import minimize_scalar

from .codebook import Codebook, average
from .errors import ConfigError, ConvergenceError

__all__ = [
    "ClonerResult",
    "cloner_fidelity",
    "gaussian_threshold_closed_form",
    "average_cloner_fidelity",
    "threshold",
]

log = logging.getLogger(__name__)

A_MAX = 50.0
SCAN_POINTS = 200
BREAKPOINT = 0.5 + 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class ClonerResult:
    f_nc: float
    a_opt: float
    codebook: Codebook


def _exponent_coefficient(A: float) -> float:
    return 2.0 * (1.0 - math.sqrt(A / 2.0)) ** 2 / (1.0 + A)


def cloner_fidelity(alpha: ArrayLike, A: float):
    """Clone fidelity of the entangling cloner for input ``|alpha>``."""
    if A < 1:
        raise ConfigError(f"cloner amplification must be >= 1, got {A}")
    x = np.abs(np.asarray(alpha, dtype=complex)) ** 2
    out = 2.0 / (1.0 + A) * np.exp(-_exponent_coefficient(A) * x)
    return float(out) if out.ndim == 0 else out


def gaussian_threshold_closed_form(sigma2: float) -> float:
    """Optimal Gaussian cloning fidelity for a Gaussian codebook of variance ``sigma2``."""
    if sigma2 <= 0:
        raise ConfigError(f"sigma2 must be positive, got {sigma2}")
    if sigma2 >= BREAKPOINT:
        return (4 * sigma2 + 2) / (6 * sigma2 + 1)
    return 1.0 / ((3 - 2 * math.sqrt(2.0)) * sigma2 + 1)


def average_cloner_fidelity(cb: Codebook, A: float, method: str = "laplace") -> float:
    """Codebook-averaged clone fidelity at amplification ``A``.

    ``method="laplace"`` uses the codebook's exact transform,
    ``"quadrature"`` integrates numerically (used to cross-check).
    """
    if A < 1:
        raise ConfigError(f"cloner amplification must be >= 1, got {A}")
    if method == "laplace":
        return 2.0 / (1.0 + A) * cb.laplace(_exponent_coefficient(A))
    if method == "quadrature":
        return average(cb, lambda a: cloner_fidelity(a, A))
    raise ConfigError(f"unknown averaging method {method!r}")


def threshold(cb: Codebook, a_max: float = A_MAX, method: str = "laplace",
              xatol: float = 1e-8) -> ClonerResult:
    """Maximise the average clone fidelity over ``A`` in ``[1, a_max]``.

    A 200-point log-spaced scan locates the best bracket, which is then
    refined with a bounded scalar search.
    """
    if a_max <= 1:
        raise ConfigError(f"a_max must exceed 1, got {a_max}")
    grid = np.geomspace(1.0, a_max, SCAN_POINTS)
    vals = np.array([average_cloner_fidelity(cb, A, method) for A in grid])
    i = int(np.argmax(vals))
    interior = (vals[1:-1] > vals[:-2]) & (vals[1:-1] >= vals[2:])
    if np.count_nonzero(interior) > 1:
        log.warning("cloner objective for %s has %d local maxima; refining the best one",
                    getattr(cb, "spec", cb), int(np.count_nonzero(interior)))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = minimize_scalar(
        lambda A: -average_cloner_fidelity(cb, A, method),
        bounds=(lo, hi), method="bounded", options={"xatol": xatol},
    )
    if not res.success:
        raise ConvergenceError(f"threshold search failed: {res.message}", estimate=float(vals[i]))
    best_a, best_f = float(res.x), float(-res.fun)
    if vals[i] > best_f:
        best_a, best_f = float(grid[i]), float(vals[i])
    return ClonerResult(f_nc=best_f, a_opt=best_a, codebook=cb)
