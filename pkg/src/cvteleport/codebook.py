"""Isotropic input ensembles of coherent-state amplitudes.

Three codebooks are supported: an untruncated Gaussian of per-quadrature
variance ``sigma2``, a uniform disk ``|alpha|^2 <= N`` and a Gaussian truncated
to that disk. All densities are over the complex plane, ``d^2 alpha =
d(Re alpha) d(Im alpha)``. Radial integrals use ``x = |alpha|^2``, for which
the measure becomes ``pi dx`` after the angular integral and Gaussian weights
become plain exponentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import ConfigError, ConvergenceError
from .quadrature import adaptive_gauss_legendre

__all__ = [
    "GaussianCodebook",
    "TruncatedUniformCodebook",
    "TruncatedGaussianCodebook",
    "Codebook",
    "parse_codebook",
    "average",
    "sample",
]

# Gaussian tails are cut where exp(-x / 2 sigma2) < exp(-TAIL)
TAIL = 80.0


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise ConfigError(f"{name} must be positive and finite, got {value}")
    return value


def _one_minus_exp(t):
    """``1 - exp(-t)`` without cancellation."""
    return -np.expm1(-np.asarray(t, dtype=float))


class _Isotropic:
    """Shared behaviour; subclasses define ``x_pdf`` and ``x_max``."""

    def x_pdf(self, x: ArrayLike) -> NDArray[np.float64]:
        raise NotImplementedError

    @property
    def x_max(self) -> float:
        raise NotImplementedError

    @property
    def x_breakpoints(self) -> tuple[float, ...]:
        return ()

    def radial_density(self, x: ArrayLike) -> NDArray[np.float64]:
        """Density in the complex plane as a function of ``x = |alpha|^2``."""
        return self.x_pdf(x) / math.pi

    def density(self, alpha: ArrayLike) -> NDArray[np.float64] | float:
        a = np.asarray(alpha, dtype=complex)
        out = self.radial_density(np.abs(a) ** 2)
        return float(out) if out.ndim == 0 else out

    @property
    def rho_max(self) -> float:
        return math.sqrt(self.x_max)


@dataclass(frozen=True)
class GaussianCodebook(_Isotropic):
    """``P(alpha) = exp(-|alpha|^2 / 2 sigma2) / (2 pi sigma2)``."""

    sigma2: float

    def __post_init__(self):
        object.__setattr__(self, "sigma2", _positive("sigma2", self.sigma2))

    def x_pdf(self, x):
        x = np.asarray(x, dtype=float)
        s = 2.0 * self.sigma2
        return np.where(x >= 0, np.exp(-np.maximum(x, 0) / s) / s, 0.0)

    @property
    def x_max(self) -> float:
        return 2.0 * self.sigma2 * TAIL

    @property
    def x_breakpoints(self):
        s = 2.0 * self.sigma2
        return (s, 4 * s, 16 * s)

    def laplace(self, c: float) -> float:
        """``E[exp(-c |alpha|^2)]``."""
        return 1.0 / (1.0 + 2.0 * self.sigma2 * c)

    @property
    def mean_photons(self) -> float:
        return 2.0 * self.sigma2

    @property
    def spec(self) -> str:
        return f"gaussian:sigma2={self.sigma2:g}"


@dataclass(frozen=True)
class TruncatedUniformCodebook(_Isotropic):
    """``P(alpha) = Theta(N - |alpha|^2) / (pi N)``."""

    N: float

    def __post_init__(self):
        object.__setattr__(self, "N", _positive("N", self.N))

    def x_pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= 0) & (x <= self.N), 1.0 / self.N, 0.0)

    @property
    def x_max(self) -> float:
        return self.N

    def laplace(self, c: float) -> float:
        t = c * self.N
        if t == 0:
            return 1.0
        return float(_one_minus_exp(t) / t)

    @property
    def mean_photons(self) -> float:
        return self.N / 2.0

    @property
    def spec(self) -> str:
        return f"truncuniform:N={self.N:g}"


@dataclass(frozen=True)
class TruncatedGaussianCodebook(_Isotropic):
    """Gaussian of variance ``sigma2`` restricted to ``|alpha|^2 <= N``.

    The normaliser is ``2 pi sigma2 (1 - exp(-N / 2 sigma2))``.
    """

    sigma2: float
    N: float

    def __post_init__(self):
        object.__setattr__(self, "sigma2", _positive("sigma2", self.sigma2))
        object.__setattr__(self, "N", _positive("N", self.N))

    @property
    def _mass(self) -> float:
        return float(_one_minus_exp(self.N / (2.0 * self.sigma2)))

    def x_pdf(self, x):
        x = np.asarray(x, dtype=float)
        s = 2.0 * self.sigma2
        inside = (x >= 0) & (x <= self.N)
        return np.where(inside, np.exp(-np.clip(x, 0, self.N) / s) / (s * self._mass), 0.0)

    @property
    def x_max(self) -> float:
        return min(self.N, 2.0 * self.sigma2 * TAIL)

    @property
    def x_breakpoints(self):
        s = 2.0 * self.sigma2
        return tuple(p for p in (s, 4 * s, 16 * s) if p < self.x_max)

    def laplace(self, c: float) -> float:
        lam = 1.0 / (2.0 * self.sigma2)
        t = (lam + c) * self.N
        return float(lam / (lam + c) * _one_minus_exp(t) / self._mass)

    @property
    def mean_photons(self) -> float:
        s, t = 2.0 * self.sigma2, self.N / (2.0 * self.sigma2)
        # E[x] of an exponential truncated at N
        if t < 1e-8:
            return self.N / 2.0
        return s - (self.N / math.expm1(t) if t < 700 else 0.0)

    @property
    def spec(self) -> str:
        return f"truncgaussian:sigma2={self.sigma2:g},N={self.N:g}"


Codebook = Union[GaussianCodebook, TruncatedUniformCodebook, TruncatedGaussianCodebook]


def parse_codebook(spec: str) -> Codebook:
    """Parse ``"gaussian:sigma2=1"``, ``"truncuniform:N=10"`` or
    ``"truncgaussian:sigma2=1,N=10"``."""
    kind, _, rest = spec.strip().partition(":")
    params: dict[str, float] = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise ConfigError(f"codebook parameter {item!r} is not key=value")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"codebook parameter {item!r} is not numeric") from None
    required = {
        "gaussian": ("sigma2",),
        "truncuniform": ("N",),
        "truncgaussian": ("sigma2", "N"),
    }
    kind = kind.strip().lower()
    if kind not in required:
        raise ConfigError(f"unknown codebook {kind!r}; choose from {sorted(required)}")
    if set(params) != set(required[kind]):
        raise ConfigError(f"{kind} codebook needs exactly {required[kind]}, got {sorted(params)}")
    cls = {"gaussian": GaussianCodebook, "truncuniform": TruncatedUniformCodebook,
           "truncgaussian": TruncatedGaussianCodebook}[kind]
    return cls(**params)


def average(cb: Codebook, f: Callable, *, isotropic: bool = True, rtol: float = 1e-10,
            max_panels: int = 4096) -> float:
    """Codebook average ``int d^2 alpha P(alpha) f(alpha)``.

    Parameters
    ----------
    f : callable
        Vectorised over a complex array of amplitudes.
    isotropic : bool
        If true ``f`` is assumed to depend on ``|alpha|`` only and is sampled on
        the positive real axis (1-D radial rule). Otherwise the angle is
        integrated with a periodic trapezoid rule refined until stable.
    """
    if isotropic:
        def integrand(x):
            return cb.x_pdf(x) * np.asarray(f(np.sqrt(x) + 0j), dtype=float)
    else:
        def integrand(x):
            return cb.x_pdf(x) * _angular_mean(f, np.sqrt(x), rtol)

    return adaptive_gauss_legendre(
        integrand, 0.0, cb.x_max, rtol=rtol, atol=1e-15,
        breakpoints=cb.x_breakpoints, max_panels=max_panels,
    )


def _angular_mean(f: Callable, rho: NDArray, rtol: float, max_points: int = 4096) -> NDArray:
    n = 32
    prev = None
    while n <= max_points:
        theta = 2 * np.pi * np.arange(n) / n
        vals = np.asarray(f(rho[:, None] * np.exp(1j * theta)[None, :]), dtype=float)
        cur = vals.mean(axis=1)
        if prev is not None and np.max(np.abs(cur - prev)) <= rtol * max(1.0, np.max(np.abs(cur))):
            return cur
        prev = cur
        n *= 2
    raise ConvergenceError("angular average did not converge", estimate=float(np.mean(prev)))


def sample(cb: Codebook, seed: int | np.random.Generator | None, size: int = 1) -> NDArray[np.complex128]:
    """Draw ``size`` amplitudes; deterministic for a fixed integer seed."""
    rng = np.random.default_rng(seed)
    phase = None
    if isinstance(cb, GaussianCodebook):
        s = math.sqrt(cb.sigma2)
        return rng.normal(0.0, s, size) + 1j * rng.normal(0.0, s, size)
    if isinstance(cb, TruncatedUniformCodebook):
        x = cb.N * rng.random(size)
    elif cb.N / cb.sigma2 >= 0.1:
        # rejection from the untruncated Gaussian; acceptance >= 1 - e^{-0.05}
        s = math.sqrt(cb.sigma2)
        out = np.empty(0, dtype=complex)
        while out.size < size:
            z = rng.normal(0.0, s, 2 * size) + 1j * rng.normal(0.0, s, 2 * size)
            out = np.concatenate([out, z[np.abs(z) ** 2 <= cb.N]])
        return out[:size]
    else:
        # inverse CDF of the exponential truncated at N
        u = rng.random(size)
        x = -2.0 * cb.sigma2 * np.log1p(-u * cb._mass)
        x = np.minimum(x, cb.N)
    phase = 2 * np.pi * rng.random(size)
    return np.sqrt(x) * np.exp(1j * phase)
