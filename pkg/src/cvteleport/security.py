"""Security of teleportation against an eavesdropper on the feedforward line.

Alice and Bob share information ``I(A:B)``; the eavesdropper (an entangling
cloner on the feedforward channel, see :func:`cvteleport.teleport.eve_attack`)
is bounded by the Holevo quantity ``chi_E``. Both reduce to additive Gaussian
noise channels acting on the codebook ``P_in``::

    beta = sqrt(k) alpha + noise(v)

so every information quantity here is ``h(P_in * N_v) - h(N_v)`` for a
suitable noise variance ``v`` (``*`` is convolution, ``h`` differential
entropy in nats). Gaussian codebooks have closed forms; the truncated ones are
integrated radially (:func:`output_entropy`).

The secure fidelity ``F_s`` is the teleportation fidelity at which
``I(A:B) = chi_E`` as the feedforward bath temperature is raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import brentq
from scipy.special import i0e, xlogy

from .codebook import Codebook, GaussianCodebook, TruncatedGaussianCodebook, TruncatedUniformCodebook
from .errors import ConfigError, ConvergenceError
from .gaussian_core import differential_entropy_gaussian, von_neumann_entropy
from .quadrature import adaptive_gauss_legendre, gauss_legendre
from .teleport import (
    FF_SEGMENT,
    TeleportConfig,
    displacement_matching_gain,
    eve_attack,
    run_chain,
    transfer_gain_matrix,
    transfer_tap,
)
from .units import noise_factor

__all__ = [
    "SecurityPoint",
    "SecureFidelity",
    "conditional_density",
    "mutual_information_gaussian",
    "output_density",
    "output_entropy",
    "mutual_information_numeric",
    "humbert_phi3",
    "truncated_output_density",
    "holevo_gaussian",
    "holevo_numeric",
    "eve_noise",
    "eve_saturated",
    "finite_parameter_point",
    "secure_fidelity",
    "minimum_secure_squeezing",
]

T_MIN = 1e-3  # K
T_MAX = 1e6  # K
# saturation guards: "T_ff >> 1" and "G >> W_ff / eps_ff"
SATURATION_W = 1e3
SATURATION_GAIN_RATIO = 1e2

_INNER_PANELS = 8
_INNER_ORDER = 16
_KERNEL_WIDTHS = 10.0
PHI3_OVERFLOW = 700.0


def conditional_density(beta: ArrayLike, alpha: ArrayLike, k: float, v_out: float):
    """Gaussian density of Bob's output amplitude given input ``alpha``."""
    if v_out <= 0 or k < 0:
        raise ConfigError("need v_out > 0 and k >= 0")
    d2 = np.abs(np.asarray(beta, dtype=complex) - math.sqrt(k) * np.asarray(alpha, dtype=complex)) ** 2
    out = np.exp(-d2 / (2 * v_out)) / (2 * math.pi * v_out)
    return float(out) if out.ndim == 0 else out


def mutual_information_gaussian(sigma2: float, k: float, v_out: float) -> float:
    """``ln(1 + k sigma2 / v_out)`` for a Gaussian codebook (nats)."""
    if sigma2 < 0 or k < 0 or v_out <= 0:
        raise ConfigError("need sigma2 >= 0, k >= 0, v_out > 0")
    return math.log1p(k * sigma2 / v_out)


def holevo_gaussian(sigma2: float, r: float) -> float:
    """Saturated eavesdropper Holevo quantity for a Gaussian codebook.

    Eve's ensemble is the codebook convolved with thermal noise of variance
    ``v_eve = (1 + cosh 2r) / 4``; the result is the entropy difference
    ``ln(1 + sigma2 / v_eve)``.
    """
    if sigma2 < 0 or r < 0:
        raise ConfigError("need sigma2 >= 0 and r >= 0")
    v_eve = (1 + math.cosh(2 * r)) / 4
    return differential_entropy_gaussian(v_eve + sigma2) - differential_entropy_gaussian(v_eve)


# ---------------------------------------------------------------------------
# radial convolution engine


def output_density(cb: Codebook, b: ArrayLike, k: float, v: float) -> NDArray[np.float64]:
    """``P_out(|beta| = b)`` for ``beta = sqrt(k) alpha + N(0, v)`` by quadrature.

    The angular integral is done analytically (a scaled Bessel ``I0``); the
    radial one uses a composite Gauss-Legendre rule on a window of
    ``+-10`` noise widths around ``b / sqrt(k)``.
    """
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if k == 0:
        return np.exp(-b**2 / (2 * v)) / (2 * math.pi * v)
    sk = math.sqrt(k)
    rho_sup = cb.rho_max
    half = _KERNEL_WIDTHS * math.sqrt(v) / sk
    lo = np.clip(b / sk - half, 0.0, rho_sup)
    hi = np.clip(b / sk + half, 0.0, rho_sup)
    x, w = gauss_legendre(_INNER_ORDER)
    t = (np.arange(_INNER_PANELS)[:, None] + (x[None, :] + 1) / 2).ravel() / _INNER_PANELS
    wt = np.tile(w, _INNER_PANELS) / (2 * _INNER_PANELS)
    span = (hi - lo)[:, None]
    rho = lo[:, None] + span * t[None, :]
    weights = span * wt[None, :]
    z = sk * rho * b[:, None] / v
    kern = np.exp(-((b[:, None] - sk * rho) ** 2) / (2 * v)) * i0e(z) / v
    p_in = cb.radial_density(rho**2)
    return np.sum(weights * rho * p_in * kern, axis=1)


def output_entropy(cb: Codebook, k: float, v: float, rtol: float = 1e-10) -> float:
    """Differential entropy (nats) of the output ensemble ``P_out``."""
    if v <= 0:
        raise ConfigError(f"noise variance must be positive, got {v}")
    if k == 0:
        return differential_entropy_gaussian(v)
    edge = math.sqrt(k) * cb.rho_max
    top = edge + 12.0 * math.sqrt(v)
    bps = [edge] if not isinstance(cb, GaussianCodebook) else []

    def integrand(b):
        p = output_density(cb, b, k, v)
        return -2 * math.pi * b * xlogy(p, p)

    return adaptive_gauss_legendre(integrand, 0.0, top, rtol=rtol, atol=1e-12,
                                   breakpoints=bps, max_panels=20000)


def _information(cb: Codebook, k: float, v: float, numeric: bool | None = None) -> float:
    """``h(P_in * N_v) - h(N_v)`` for the channel ``sqrt(k) alpha + N(0, v)``."""
    if k == 0 or not math.isfinite(v):
        return 0.0
    if isinstance(cb, GaussianCodebook) and not numeric:
        return mutual_information_gaussian(cb.sigma2, k, v)
    # rescale so k = 1; entropy differences are scale invariant
    return output_entropy(cb, 1.0, v / k) - differential_entropy_gaussian(v / k)


def mutual_information_numeric(cb: Codebook, k: float, v_out: float) -> float:
    """Alice-Bob mutual information by numerical integration (nats).

    Evaluated as ``h(P_out) - h(P_cond)``, which equals the double integral
    of ``P_cond P_in ln(P_cond / P_out)`` because ``h(P_cond)`` does not
    depend on ``alpha``.
    """
    if k < 0 or v_out <= 0:
        raise ConfigError("need k >= 0 and v_out > 0")
    return _information(cb, k, v_out, numeric=True)


def holevo_numeric(cb: Codebook, r: float, v_eve: float | None = None) -> float:
    """Holevo quantity of the thermally smeared codebook, numerically.

    ``v_eve`` defaults to the saturated value ``(1 + cosh 2r) / 4``.
    """
    if v_eve is None:
        v_eve = (1 + math.cosh(2 * r)) / 4
    return _information(cb, 1.0, v_eve, numeric=True)


# ---------------------------------------------------------------------------
# closed form for the truncated Gaussian


def humbert_phi3(x: ArrayLike, y: ArrayLike, rtol: float = 1e-12, max_terms: int = 20000):
    """``Phi_3(1, 1; x, y) = sum_{m,n} x^m y^n / (n! (m+n)!)`` for ``x, y >= 0``.

    Summed along anti-diagonals ``M = m + n`` with the recurrence
    ``A_{M+1} = x A_M / (M+1) + y^{M+1} / ((M+1)!)^2``. Once the ratio bound
    ``rho_M = x/(M+1) + y/(M+1)^2`` drops below 1 the remaining tail is
    bounded by the geometric series ``A_M rho_M / (1 - rho_M)``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    if np.any(x < 0) or np.any(y < 0):
        raise ValueError("series implemented for non-negative arguments")
    A = np.ones(x.shape)
    s = np.ones(x.shape)
    total = np.ones(x.shape)
    for M in range(max_terms):
        rho = x / (M + 1) + y / (M + 1) ** 2
        with np.errstate(over="ignore"):
            tail = np.where(rho < 1, A * rho / np.maximum(1 - rho, 1e-300), np.inf)
        if np.all(tail <= rtol * total):
            out = total
            return float(out) if out.ndim == 0 else out
        s = s * y / (M + 1) ** 2
        A = x * A / (M + 1) + s
        total = total + A
    raise ConvergenceError("Phi_3 series did not converge", estimate=float(np.max(total)))


def truncated_output_density(beta: ArrayLike, sigma2: float, N: float, k: float, v_out: float):
    """Output ensemble density for a truncated Gaussian codebook.

    Uses the closed form in terms of :func:`humbert_phi3`, with
    ``zeta = 1/(2 sigma2) + k/(2 v_out)`` and ``xi = k / (4 zeta v_out^2)``.
    ``sigma2 = inf`` gives the truncated uniform codebook. Points where the
    series arguments exceed the overflow guard are evaluated by direct
    convolution instead.
    """
    b2 = np.abs(np.asarray(beta, dtype=complex)) ** 2
    scalar = b2.ndim == 0
    b2 = np.atleast_1d(b2)
    if N <= 0 or v_out <= 0 or k <= 0 or sigma2 <= 0:
        raise ConfigError("need N, k, v_out, sigma2 > 0")
    inv_s = 0.0 if math.isinf(sigma2) else 1.0 / (2 * sigma2)
    zeta = inv_s + k / (2 * v_out)
    xi = k / (4 * zeta * v_out**2)
    if math.isinf(sigma2):
        pref = np.full(b2.shape, 1.0 / (math.pi * k * N))
        cb: Codebook = TruncatedUniformCodebook(N)
    else:
        total_v = v_out + k * sigma2
        pref = np.exp(-b2 / (2 * total_v)) / (2 * math.pi * total_v * -math.expm1(-N * inv_s))
        cb = TruncatedGaussianCodebook(sigma2, N)
    x = xi * b2
    y = xi * zeta * N * b2
    out = np.empty(b2.shape)
    ok = x + y <= PHI3_OVERFLOW
    if np.any(ok):
        phi = np.atleast_1d(humbert_phi3(x[ok], y[ok]))
        out[ok] = pref[ok] * (1.0 - np.exp(-zeta * N - x[ok]) * phi)
    if np.any(~ok):
        out[~ok] = output_density(cb, np.sqrt(b2[~ok]), k, v_out)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# eavesdropper on the feedforward channel


@dataclass(frozen=True)
class EveChannel:
    """Eve's two modes as a linear Gaussian channel ``H alpha + N(0, C)``.

    ``H`` is 4x2 (only the siphoned mode carries signal) and ``C`` the 4x4
    covariance of her modes for a fixed input. Her idler is correlated with
    the injected noise, so using both modes removes most of the bath noise.
    """

    H: NDArray[np.float64]
    C: NDArray[np.float64]
    eve_state: object = field(repr=False, default=None)

    @property
    def precision(self) -> NDArray[np.float64]:
        """Input-referred information matrix ``H^T C^-1 H``."""
        return self.H.T @ np.linalg.solve(self.C, self.H)

    @property
    def effective_noise(self) -> float:
        """Input-referred isotropic noise variance ``det(H^T C^-1 H)^(-1/2)``."""
        det = float(np.linalg.det(self.precision))
        return math.inf if det <= 0 else 1.0 / math.sqrt(det)

    def holevo_gaussian_codebook(self, sigma2: float) -> float:
        """``h(P_E) - h(P_th)`` for a Gaussian codebook, anisotropy kept exactly."""
        if not np.any(self.H):
            return 0.0
        return 0.5 * float(np.log(np.linalg.det(np.eye(2) + sigma2 * self.precision)))


def _chain_config(r: float, G: float, eps_ff: float, T_ff: float, frequency: float,
                  eta: float | None = None) -> TeleportConfig:
    if eta is None:
        eta = displacement_matching_gain(1.0, eps_ff) / G
    if not 0 < eta <= 1:
        raise ConfigError(f"matched coupling eta = {eta:.4g} outside (0, 1]; gain {G:.4g} too small")
    cfg = TeleportConfig(squeeze_r=r, gain=G, coupling=eta, frequency=frequency)
    return cfg.with_segment(FF_SEGMENT, loss=eps_ff, temp=T_ff)


def eve_noise(config: TeleportConfig) -> EveChannel:
    """Eve's linear-Gaussian channel for the feedforward loss/bath of ``config``."""
    base = config.replace(alpha=0j, ensemble_sigma2=None)
    ff = transfer_tap(base)
    H_ff = transfer_gain_matrix(base)
    W = config.segment_noise_factor(FF_SEGMENT)
    eve, _ = eve_attack(ff, config.eps_ff, W)
    H = np.zeros((4, 2))
    H[0:2] = -math.sqrt(config.eps_ff) * H_ff
    return EveChannel(H=H, C=np.array(eve.V), eve_state=eve)


def eve_saturated(G: float, eps_ff: float, T_ff: float, frequency: float = 5e9,
                  w_min: float = SATURATION_W, gain_ratio: float = SATURATION_GAIN_RATIO) -> bool:
    """Whether the bath and gain are deep enough for Eve's Holevo quantity to
    sit at its saturated value: ``W_ff > w_min`` and ``G > gain_ratio W_ff / eps_ff``.
    """
    if eps_ff <= 0:
        return False
    W = noise_factor(T_ff, frequency)
    return W > w_min and G > gain_ratio * W / eps_ff


def _holevo_von_neumann(config: TeleportConfig, sigma2: float) -> float:
    """Two-mode Gaussian Holevo quantity of Eve's modes (Gaussian codebook)."""
    W = config.segment_noise_factor(FF_SEGMENT)
    cond, _ = eve_attack(transfer_tap(config.replace(alpha=0j, ensemble_sigma2=None)), config.eps_ff, W)
    ens, _ = eve_attack(transfer_tap(config.replace(alpha=0j, ensemble_sigma2=sigma2)), config.eps_ff, W)
    return von_neumann_entropy(ens.V) - von_neumann_entropy(cond.V)


@dataclass(frozen=True)
class SecurityPoint:
    mutual_information: float
    holevo: float
    fidelity: float
    k: float
    v_out: float
    v_eve: float
    params: dict

    @property
    def secure(self) -> bool:
        return self.mutual_information > self.holevo


def finite_parameter_point(r: float, G: float, eps_ff: float, T_ff: float,
                           frequency: float = 5e9, cb: Codebook | None = None,
                           eta: float | None = None, pipeline: str = "differential") -> SecurityPoint:
    """``I(A:B)``, ``chi_E`` and the fidelity at one operating point.

    Bob's output is propagated through the full chain (lossless except the
    feedforward segment) at the displacement-matched coupling unless ``eta``
    is given. ``pipeline="von_neumann"`` evaluates Eve's Holevo quantity from
    the symplectic spectra of her two modes (Gaussian codebooks only).
    """
    cb = cb or GaussianCodebook(1.0)
    if pipeline not in ("differential", "von_neumann"):
        raise ConfigError(f"unknown Holevo pipeline {pipeline!r}")
    cfg = _chain_config(r, G, eps_ff, T_ff, frequency, eta)
    res = run_chain(cfg)
    k, v_out = res.displacement_gain, res.v_out
    info = _information(cb, k, v_out)
    if eps_ff == 0:
        chi, v_eve = 0.0, math.inf
    else:
        eve = eve_noise(cfg)
        v_eve = eve.effective_noise
        if pipeline == "von_neumann":
            if not isinstance(cb, GaussianCodebook):
                raise ConfigError("the von Neumann pipeline needs a Gaussian codebook")
            chi = _holevo_von_neumann(cfg, cb.sigma2)
        elif isinstance(cb, GaussianCodebook):
            chi = eve.holevo_gaussian_codebook(cb.sigma2)
        else:
            chi = _information(cb, 1.0, v_eve)
    params = dict(squeeze_r=r, gain=G, coupling=cfg.coupling, eps_ff=eps_ff, temp_ff=T_ff,
                  frequency=frequency, codebook=getattr(cb, "spec", str(cb)), pipeline=pipeline,
                  saturated=eve_saturated(G, eps_ff, T_ff, frequency))
    return SecurityPoint(info, chi, res.fidelity, k, v_out, v_eve, params)


@dataclass(frozen=True)
class SecureFidelity:
    """Outcome of the crossing search.

    ``status`` is ``"crossing"`` when ``I(A:B) = chi_E`` at some bath
    temperature; ``"always-secure"`` / ``"never-secure"`` when no crossing
    lies in the search range; ``"unattainable"`` in the infinite-gain limit
    when the threshold fidelity exceeds what the squeezing can deliver.
    """

    fidelity: float
    status: str
    temperature: float | None = None

    @property
    def is_crossing(self) -> bool:
        return self.status == "crossing"


def _limit_secure_fidelity(r: float, cb: Codebook) -> SecureFidelity:
    chi = _information(cb, 1.0, (1 + math.cosh(2 * r)) / 4)

    def gap(log_v):
        return _information(cb, 1.0, math.exp(log_v)) - chi

    lo, hi = math.log(1e-6), math.log(1e6)
    log_v = brentq(gap, lo, hi, xtol=1e-13, rtol=1e-13)
    v_star = math.exp(log_v)
    v_min = (1 + 2 * math.exp(-2 * r)) / 4
    status = "crossing" if v_star >= v_min else "unattainable"
    return SecureFidelity(2.0 / (1.0 + 4.0 * v_star), status)


def secure_fidelity(r: float, G: float, eps_ff: float, frequency: float = 5e9,
                    cb: Codebook | None = None, pipeline: str = "differential",
                    t_range: tuple[float, float] = (T_MIN, T_MAX)) -> SecureFidelity:
    """Teleportation fidelity where ``I(A:B) = chi_E`` as ``T_ff`` rises.

    ``G = inf`` evaluates the projective-measurement limit, in which Bob's
    output noise is ``(1 + 2 e^{-2r})/4`` plus the feedforward term and Eve
    is saturated at ``(1 + cosh 2r)/4``.

    The bracket is located on a decade grid from ``t_range[0]`` upward and
    refined with Brent's method in ``log10 T``.
    """
    cb = cb or GaussianCodebook(1.0)
    if math.isinf(G):
        return _limit_secure_fidelity(r, cb)
    if eps_ff <= 0:
        return SecureFidelity(math.nan, "always-secure")

    def gap(log_t):
        p = finite_parameter_point(r, G, eps_ff, 10.0**log_t, frequency, cb, pipeline=pipeline)
        return p.mutual_information - p.holevo

    lo_t, hi_t = (math.log10(t) for t in t_range)
    grid = np.arange(lo_t, hi_t + 0.5, 1.0)
    vals = [gap(g) for g in grid]
    if vals[0] <= 0:
        return SecureFidelity(math.nan, "never-secure")
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa > 0 >= fb:
            try:
                log_t = brentq(gap, a, b, xtol=1e-10, rtol=1e-12)
            except (ValueError, RuntimeError) as exc:
                raise ConvergenceError(
                    f"crossing search failed in T = [{10**a:.3g}, {10**b:.3g}] K "
                    f"(gap {fa:.3g} -> {fb:.3g}): {exc}"
                ) from None
            T = 10.0**log_t
            p = finite_parameter_point(r, G, eps_ff, T, frequency, cb, pipeline=pipeline)
            return SecureFidelity(p.fidelity, "crossing", T)
    return SecureFidelity(math.nan, "always-secure")


def minimum_secure_squeezing(G: float, eps_ff: float = 0.5, frequency: float = 5e9,
                             cb: Codebook | None = None, s_max_db: float = 20.0) -> float:
    """Smallest squeezing (dB) admitting a secure region ``I(A:B) > chi_E``.

    In the ``G = inf`` limit the saturated expressions are compared directly;
    otherwise the coldest feedforward bath (``T_MIN``) is used, since the gap
    ``I - chi`` only shrinks as the bath heats up. Returns 0 when even
    unsqueezed resources are secure.
    """
    cb = cb or GaussianCodebook(1.0)
    to_r = math.log(10.0) / 20.0

    if math.isinf(G):
        def gap(s_db):
            r = s_db * to_r
            return _information(cb, 1.0, (1 + 2 * math.exp(-2 * r)) / 4) - _information(
                cb, 1.0, (1 + math.cosh(2 * r)) / 4)
    else:
        if G < 1:
            raise ConfigError(f"gain must be >= 1, got {G}")

        def gap(s_db):
            p = finite_parameter_point(s_db * to_r, G, eps_ff, T_MIN, frequency, cb)
            return p.mutual_information - p.holevo

    if gap(0.0) > 0:
        return 0.0
    if gap(s_max_db) <= 0:
        raise ConvergenceError(f"no secure squeezing level below {s_max_db} dB", estimate=math.inf)
    return float(brentq(gap, 0.0, s_max_db, xtol=1e-10))
