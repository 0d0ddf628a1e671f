"""Phase-space description of Gaussian states.

Conventions used throughout the package:

* vacuum variance is **1/4** per quadrature (many references use 1/2 or 1);
* quadratures are ordered ``(p1, q1, p2, q2, ...)``;
* a coherent state with amplitude ``alpha`` has displacement
  ``(Re alpha, Im alpha)`` and covariance ``I/4``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.special import xlogy

from .errors import PhysicsError

SYMMETRY_TOL = 1e-12
PHYSICAL_TOL = 1e-9
VACUUM_VARIANCE = 0.25

__all__ = [
    "GaussianState",
    "SymplecticOp",
    "symplectic_form",
    "vacuum",
    "coherent",
    "thermal",
    "tensor",
    "apply",
    "uhlmann_fidelity",
    "extract_modes",
    "symplectic_eigenvalues",
    "von_neumann_entropy",
    "differential_entropy_gaussian",
]


def symplectic_form(n_modes: int) -> NDArray[np.float64]:
    """Block-diagonal symplectic form for ``n_modes`` modes."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _frozen(a) -> NDArray[np.float64]:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GaussianState:
    """First and second quadrature moments of an ``n``-mode Gaussian state.

    The covariance matrix is symmetrised on construction. Physicality is not
    enforced here (long operator chains check it at each step); use
    :meth:`check_physical`.
    """

    d: NDArray[np.float64]
    V: NDArray[np.float64]
    n_modes: int = field(init=False)

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float).reshape(-1)
        V = np.asarray(self.V, dtype=float)
        if V.ndim != 2 or V.shape[0] != V.shape[1] or V.shape[0] % 2:
            raise ValueError(f"covariance must be square with even size, got {V.shape}")
        if d.shape[0] != V.shape[0]:
            raise ValueError(f"displacement length {d.shape[0]} != covariance size {V.shape[0]}")
        if not np.all(np.isfinite(V)) or not np.all(np.isfinite(d)):
            raise PhysicsError("non-finite entries in state moments")
        scale = max(1.0, float(np.max(np.abs(V))))
        if np.max(np.abs(V - V.T)) > 1e-6 * scale:
            raise ValueError("covariance matrix is not symmetric")
        object.__setattr__(self, "d", _frozen(d))
        object.__setattr__(self, "V", _frozen(0.5 * (V + V.T)))
        object.__setattr__(self, "n_modes", V.shape[0] // 2)

    def uncertainty_eigenvalues(self) -> NDArray[np.float64]:
        """Eigenvalues of the Hermitian matrix ``V + (i/4) Omega``."""
        omega = symplectic_form(self.n_modes)
        return np.linalg.eigvalsh(self.V + 0.25j * omega)

    def _floor(self, tol: float) -> float:
        # roundoff grows with the largest entry once amplified modes exceed O(1)
        return -tol * max(1.0, float(np.max(np.abs(self.V))))

    def is_physical(self, tol: float = PHYSICAL_TOL) -> bool:
        return bool(self.uncertainty_eigenvalues().min() >= self._floor(tol))

    def check_physical(self, tol: float = PHYSICAL_TOL, where: str = "") -> "GaussianState":
        lam = self.uncertainty_eigenvalues().min()
        if lam < self._floor(tol):
            loc = f" at {where}" if where else ""
            raise PhysicsError(f"unphysical covariance{loc}: min eigenvalue of V + i Omega/4 is {lam:.3e}")
        return self

    def mode(self, k: int) -> "GaussianState":
        return extract_modes(self, [k])


@dataclass(frozen=True)
class SymplecticOp:
    """Linear quadrature map ``d -> M d``, ``V -> M V M^T``.

    ``losses`` holds the lost power fraction per mode for attenuation
    operators, which are contractions rather than symplectic maps; the bath
    noise that restores physicality is supplied separately to :func:`apply`.
    """

    M: NDArray[np.float64]
    label: str = ""
    losses: tuple[float, ...] | None = None

    def __post_init__(self):
        M = np.asarray(self.M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
            raise ValueError(f"operator matrix must be square with even size, got {M.shape}")
        object.__setattr__(self, "M", _frozen(M))

    @property
    def n_modes(self) -> int:
        return self.M.shape[0] // 2

    @property
    def is_loss(self) -> bool:
        return self.losses is not None

    def is_symplectic(self, tol: float = 1e-9) -> bool:
        omega = symplectic_form(self.n_modes)
        return bool(np.max(np.abs(self.M.T @ omega @ self.M - omega)) < tol)


def vacuum(n_modes: int = 1) -> GaussianState:
    return GaussianState(np.zeros(2 * n_modes), VACUUM_VARIANCE * np.eye(2 * n_modes))


def coherent(alpha: complex) -> GaussianState:
    return GaussianState(np.array([alpha.real, alpha.imag]), VACUUM_VARIANCE * np.eye(2))


def thermal(n: float, alpha: complex = 0j) -> GaussianState:
    """Displaced thermal state with mean photon number ``n``."""
    if n < 0:
        raise PhysicsError(f"thermal occupation must be >= 0, got {n}")
    return GaussianState(np.array([alpha.real, alpha.imag]), (2 * n + 1) / 4 * np.eye(2))


def tensor(*states: GaussianState) -> GaussianState:
    """Product state of the given states, modes in argument order."""
    d = np.concatenate([s.d for s in states])
    size = d.shape[0]
    V = np.zeros((size, size))
    i = 0
    for s in states:
        k = s.V.shape[0]
        V[i : i + k, i : i + k] = s.V
        i += k
    return GaussianState(d, V)


def apply(op: SymplecticOp, state: GaussianState, added_noise=None) -> GaussianState:
    """Propagate ``state`` through ``op`` and add ``added_noise`` to V."""
    M = op.M
    if M.shape[0] != state.V.shape[0]:
        raise ValueError(f"operator acts on {op.n_modes} modes, state has {state.n_modes}")
    V = M @ state.V @ M.T
    if added_noise is not None:
        N = np.asarray(added_noise, dtype=float)
        if N.shape != V.shape:
            raise ValueError(f"noise matrix shape {N.shape} != {V.shape}")
        if np.max(np.abs(N - N.T)) > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(N)))):
            raise ValueError("noise matrix is not symmetric")
        V = V + N
    return GaussianState(M @ state.d, V)


def uhlmann_fidelity(s1: GaussianState, s2: GaussianState) -> float:
    """Uhlmann fidelity of two single-mode Gaussian states.

    Uses the closed form for single modes with ``Lambda = det(V1 + V2)``
    and ``Delta = 16 (det V1 - 1/16)(det V2 - 1/16)``.
    """
    if s1.n_modes != 1 or s2.n_modes != 1:
        raise ValueError("uhlmann_fidelity is defined for single-mode states")
    det1 = np.linalg.det(s1.V)
    det2 = np.linalg.det(s2.V)
    if det1 < 1 / 16 - PHYSICAL_TOL or det2 < 1 / 16 - PHYSICAL_TOL:
        raise PhysicsError(f"unphysical covariance: det V = {det1:.6g}, {det2:.6g} < 1/16")
    delta = 16.0 * (det1 - 1 / 16) * (det2 - 1 / 16)
    if delta < -PHYSICAL_TOL:
        raise PhysicsError(f"negative Delta = {delta:.3e}")
    delta = max(delta, 0.0)
    Vs = s1.V + s2.V
    lam = np.linalg.det(Vs)
    diff = s1.d - s2.d
    expo = -0.5 * diff @ np.linalg.solve(Vs, diff)
    F = 0.5 * np.exp(expo) / (np.sqrt(lam + delta) - np.sqrt(delta))
    if F > 1.0 + PHYSICAL_TOL:
        raise PhysicsError(f"fidelity {F!r} exceeds 1 beyond roundoff")
    return float(min(max(F, 0.0), 1.0))


def extract_modes(state: GaussianState, modes: Sequence[int]) -> GaussianState:
    """Reduced state on ``modes`` (0-based, in the given order)."""
    modes = list(modes)
    if len(set(modes)) != len(modes):
        raise ValueError(f"duplicate mode indices in {modes}")
    for m in modes:
        if not 0 <= m < state.n_modes:
            raise IndexError(f"mode {m} out of range for a {state.n_modes}-mode state")
    idx = np.array([[2 * m, 2 * m + 1] for m in modes], dtype=int).reshape(-1)
    return GaussianState(state.d[idx], state.V[np.ix_(idx, idx)])


def symplectic_eigenvalues(V) -> NDArray[np.float64]:
    """Sorted symplectic spectrum of a covariance matrix (vacuum -> 1/4)."""
    V = np.asarray(V, dtype=float)
    n = V.shape[0] // 2
    GaussianState(np.zeros(2 * n), V).check_physical()
    ev = np.sort(np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ V)))
    nu = ev[::2]
    if nu.min() < VACUUM_VARIANCE - PHYSICAL_TOL:
        raise PhysicsError(f"symplectic eigenvalue {nu.min():.6g} below vacuum level")
    return np.maximum(nu, VACUUM_VARIANCE)


def _g(n):
    return xlogy(n + 1, n + 1) - xlogy(n, n)


def von_neumann_entropy(V) -> float:
    """Von Neumann entropy (nats) of a Gaussian state with covariance ``V``."""
    nu = symplectic_eigenvalues(V)
    occupations = np.maximum((4 * nu - 1) / 2, 0.0)
    return float(np.sum(_g(occupations)))


def differential_entropy_gaussian(v) -> float:
    """Shannon differential entropy (nats) of a zero-mean Gaussian.

    A scalar ``v`` is the per-quadrature variance of an isotropic two-quadrature
    distribution, giving ``ln(2 pi e v)``. A matrix is treated as the full
    covariance of a ``dim``-dimensional Gaussian.
    """
    a = np.asarray(v, dtype=float)
    if a.ndim == 0:
        if a <= 0:
            raise ValueError(f"variance must be positive, got {float(a)}")
        return float(np.log(2 * np.pi * np.e * a))
    sign, logdet = np.linalg.slogdet(a)
    if sign <= 0:
        raise ValueError("covariance must be positive definite")
    dim = a.shape[0]
    return float(0.5 * (dim * np.log(2 * np.pi * np.e) + logdet))
