"""Analog CV teleportation of coherent states as a Gaussian operator chain.

Three modes are tracked: mode 1 holds Bob's half of the two-mode squeezed
(TMS) resource, mode 2 Alice's half, mode 3 the input state. The protocol is
the product (applied right to left)::

    L7 D L6 L5 B23 L4 G34 L3 B23 L2 B12 L1 S12

with ``S12`` the pair of orthogonal squeezers, ``B`` balanced beam splitters,
``G34`` the phase-sensitive measurement amplifiers, ``D`` Bob's directional
coupler and ``L_i`` per-segment losses. Segment ``j`` (1..21) of loss operator
``L_{i+1}`` acting on mode ``m`` is ``j = 3 i + m``; segment 16 is the
entanglement-distribution channel and segment 17 the feedforward channel.

Each loss step ``V -> (1 - eps) V + eps W / 4`` couples in a thermal bath with
``W = 2 n + 1``.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, PhysicsError
from .gaussian_core import (
    GaussianState,
    SymplecticOp,
    apply,
    coherent,
    extract_modes,
    uhlmann_fidelity,
)
from .units import noise_factor

N_SEGMENTS = 21
ENT_SEGMENT = 16
FF_SEGMENT = 17
TRANSFER_STEPS = 10  # S12 .. L5 inclusive

I2 = np.eye(2)
Z2 = np.zeros((2, 2))


def _rot(g: float) -> np.ndarray:
    c, s = math.cos(g), math.sin(g)
    return np.array([[c, -s], [s, c]])


def _blockdiag(*blocks) -> np.ndarray:
    n = len(blocks)
    M = np.zeros((2 * n, 2 * n))
    for i, b in enumerate(blocks):
        M[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = b
    return M


@dataclass(frozen=True)
class TeleportConfig:
    """Full parameter set of the chain, in linear units.

    ``losses`` and ``bath_temps`` are indexed by segment - 1. Use
    :func:`cvteleport.config.config_from_mapping` to build one from dB-valued
    keys.
    """

    squeeze_r: float = 0.0
    gain: float = 1.0
    coupling: float = 0.0
    losses: tuple[float, ...] = (0.0,) * N_SEGMENTS
    bath_temps: tuple[float, ...] = (0.0,) * N_SEGMENTS
    input_noise: tuple[float, float, float] = (0.0, 0.0, 0.0)
    frequency: float = 5e9
    alpha: complex = 0j
    ensemble_sigma2: float | None = None
    squeeze_angles: tuple[float, float] = (0.0, math.pi / 2)
    measurement_angles: tuple[float, float] | None = None
    noise_segments: str = "all"

    def __post_init__(self):
        object.__setattr__(self, "losses", tuple(float(e) for e in self.losses))
        object.__setattr__(self, "bath_temps", tuple(float(t) for t in self.bath_temps))
        object.__setattr__(self, "input_noise", tuple(float(n) for n in self.input_noise))
        object.__setattr__(self, "alpha", complex(self.alpha))
        if len(self.losses) != N_SEGMENTS or len(self.bath_temps) != N_SEGMENTS:
            raise ConfigError(f"losses and bath_temps need {N_SEGMENTS} entries")
        if any(not 0.0 <= e <= 1.0 for e in self.losses):
            raise ConfigError(f"segment losses must lie in [0, 1]: {self.losses}")
        if any(t < 0 for t in self.bath_temps):
            raise ConfigError("bath temperatures must be >= 0 K")
        if self.squeeze_r < 0:
            raise ConfigError(f"squeeze factor must be >= 0, got {self.squeeze_r}")
        if self.gain < 1:
            raise ConfigError(f"measurement gain must be >= 1, got {self.gain}")
        if not 0.0 <= self.coupling <= 1.0:
            raise ConfigError(f"coupling must lie in [0, 1], got {self.coupling}")
        if len(self.input_noise) != 3 or any(n < 0 for n in self.input_noise):
            raise ConfigError("input_noise needs three non-negative photon numbers")
        if self.frequency <= 0:
            raise ConfigError("carrier frequency must be positive")
        if self.ensemble_sigma2 is not None and self.ensemble_sigma2 < 0:
            raise ConfigError("ensemble variance must be >= 0")
        if self.noise_segments not in ("all", "channels"):
            raise ConfigError("noise_segments must be 'all' or 'channels'")

    @property
    def eps_ent(self) -> float:
        return self.losses[ENT_SEGMENT - 1]

    @property
    def eps_ff(self) -> float:
        return self.losses[FF_SEGMENT - 1]

    @property
    def temp_ent(self) -> float:
        return self.bath_temps[ENT_SEGMENT - 1]

    @property
    def temp_ff(self) -> float:
        return self.bath_temps[FF_SEGMENT - 1]

    def replace(self, **changes) -> "TeleportConfig":
        return dataclasses.replace(self, **changes)

    def with_segment(self, segment: int, loss: float | None = None, temp: float | None = None):
        """Copy with one segment's loss and/or bath temperature overridden."""
        losses = list(self.losses)
        temps = list(self.bath_temps)
        if loss is not None:
            losses[segment - 1] = loss
        if temp is not None:
            temps[segment - 1] = temp
        return self.replace(losses=tuple(losses), bath_temps=tuple(temps))

    def matched(self) -> "TeleportConfig":
        """Copy with the gain set by the displacement-matching condition."""
        return self.replace(gain=displacement_matching_gain(self.coupling, self.eps_ff))

    def matched_coupling(self) -> "TeleportConfig":
        """Copy with the coupling set by the displacement-matching condition."""
        eta = displacement_matching_gain(self.gain, self.eps_ff)
        if eta > 1:
            raise ConfigError(f"matching needs eta = {eta:.4g} > 1; raise the gain")
        return self.replace(coupling=eta)

    def segment_noise_factor(self, segment: int) -> float:
        if self.noise_segments == "channels" and segment not in (ENT_SEGMENT, FF_SEGMENT):
            return 1.0
        return noise_factor(self.bath_temps[segment - 1], self.frequency)


@dataclass(frozen=True)
class ChainResult:
    bob_state: GaussianState
    feedforward_state: GaussianState
    fidelity: float | None
    displacement_gain: float
    final_state: GaussianState = field(repr=False)
    transfer: np.ndarray = field(repr=False)

    @property
    def v_out(self) -> float:
        """Bob's per-quadrature output variance (mean of the diagonal)."""
        return float(np.trace(self.bob_state.V) / 2)

    @property
    def displacement_matrix(self) -> np.ndarray:
        """2x2 map from the input amplitude (Re, Im) to Bob's displacement."""
        return self.transfer[0:2, 4:6]


def build_initial(config: TeleportConfig) -> GaussianState:
    n1, n2, n3 = config.input_noise
    d = np.zeros(6)
    V = np.zeros((6, 6))
    V[0:2, 0:2] = (1 + 2 * n1) / 4 * I2
    V[2:4, 2:4] = (1 + 2 * n2) / 4 * I2
    if config.ensemble_sigma2 is None:
        d[4], d[5] = config.alpha.real, config.alpha.imag
        V[4:6, 4:6] = (1 + 2 * n3) / 4 * I2
    else:
        V[4:6, 4:6] = (4 * config.ensemble_sigma2 + 1 + 2 * n3) / 4 * I2
    return GaussianState(d, V)


def _squeezer(r: float, g1: float, g2: float) -> np.ndarray:
    R = _blockdiag(_rot(g1), _rot(g2), I2)
    J = np.diag([math.exp(-r), math.exp(r), math.exp(-r), math.exp(r), 1.0, 1.0])
    return R @ J @ R.T


def _amplifier(G: float, g3: float, g4: float) -> np.ndarray:
    R = _blockdiag(I2, _rot(g3), _rot(g4))
    s = math.sqrt(G)
    J = np.diag([1.0, 1.0, 1 / s, s, 1 / s, s])
    return R @ J @ R.T


def beam_splitter_12() -> np.ndarray:
    h = math.sqrt(0.5)
    return np.block([[h * I2, h * I2, Z2], [-h * I2, h * I2, Z2], [Z2, Z2, I2]])


def beam_splitter_23() -> np.ndarray:
    h = math.sqrt(0.5)
    return np.block([[I2, Z2, Z2], [Z2, h * I2, h * I2], [Z2, -h * I2, h * I2]])


def directional_coupler(eta: float) -> np.ndarray:
    a, b = math.sqrt(1 - eta), math.sqrt(eta)
    return np.block([[a * I2, b * I2, Z2], [-b * I2, a * I2, Z2], [Z2, Z2, I2]])


def loss_operator(index: int, losses) -> SymplecticOp:
    """``L_{index}`` (1..7) built from segments ``3(index-1)+1 .. 3(index-1)+3``."""
    eps = tuple(losses[3 * (index - 1) + m] for m in range(3))
    M = _blockdiag(*(math.sqrt(1 - e) * I2 for e in eps))
    return SymplecticOp(M, f"L{index}", losses=eps)


def build_operators(config: TeleportConfig) -> list[SymplecticOp]:
    """Operators in application order (rightmost factor first)."""
    g1, g2 = config.squeeze_angles
    g3, g4 = config.measurement_angles or config.squeeze_angles
    L = lambda i: loss_operator(i, config.losses)  # noqa: E731
    return [
        SymplecticOp(_squeezer(config.squeeze_r, g1, g2), "S12"),
        L(1),
        SymplecticOp(beam_splitter_12(), "B12"),
        L(2),
        SymplecticOp(beam_splitter_23(), "B23"),
        L(3),
        SymplecticOp(_amplifier(config.gain, g3, g4), "G34"),
        L(4),
        SymplecticOp(beam_splitter_23(), "B23"),
        L(5),
        L(6),
        SymplecticOp(directional_coupler(config.coupling), "D"),
        L(7),
    ]


def _loss_noise(op: SymplecticOp, config: TeleportConfig) -> np.ndarray:
    index = int(op.label[1:])
    N = np.zeros((6, 6))
    for m, eps in enumerate(op.losses):
        if eps:
            w = config.segment_noise_factor(3 * (index - 1) + m + 1)
            N[2 * m : 2 * m + 2, 2 * m : 2 * m + 2] = eps * w / 4 * I2
    return N


def propagate(config: TeleportConfig, steps: int | None = None, check: bool = True):
    """Run the first ``steps`` operators; return the state and the linear map."""
    ops = build_operators(config)[:steps]
    state = build_initial(config)
    transfer = np.eye(6)
    for i, op in enumerate(ops):
        noise = _loss_noise(op, config) if op.is_loss else None
        state = apply(op, state, noise)
        transfer = op.M @ transfer
        if check:
            state.check_physical(where=f"step {i + 1} ({op.label})")
    if not check:
        state.check_physical(where="end of chain")
    return state, transfer


def run_chain(config: TeleportConfig, check: bool = True) -> ChainResult:
    """Propagate the full protocol and score Bob's output.

    The fidelity compares Bob's mode against the pure coherent input
    ``|alpha>``; it is ``None`` in ensemble mode.
    """
    final, transfer = propagate(config, check=check)
    ff_state, _ = propagate(config, TRANSFER_STEPS, check=False)
    bob = extract_modes(final, [0])
    fid = None
    if config.ensemble_sigma2 is None:
        fid = uhlmann_fidelity(bob, coherent(config.alpha))
    k = abs(float(np.linalg.det(transfer[0:2, 4:6])))
    return ChainResult(bob, extract_modes(ff_state, [1]), fid, k, final, transfer)


def transfer_tap(config: TeleportConfig) -> GaussianState:
    """Feedforward mode right after the measurement (through ``L5``)."""
    state, _ = propagate(config, TRANSFER_STEPS)
    return extract_modes(state, [1])


def transfer_gain_matrix(config: TeleportConfig) -> np.ndarray:
    """2x2 map from the input amplitude to the feedforward displacement."""
    _, transfer = propagate(config, TRANSFER_STEPS, check=False)
    return transfer[2:4, 4:6]


def displacement_matching_gain(eta: float, eps_ff: float = 0.0) -> float:
    """Gain satisfying ``G eta (1 - eps_ff) = 4``."""
    if eta <= 0:
        raise ConfigError("displacement matching needs a coupling eta > 0")
    if eps_ff >= 1:
        raise ConfigError("displacement matching is impossible with eps_ff = 1")
    return 4.0 / (eta * (1.0 - eps_ff))


def closed_form_output(r: float, G: float, eta: float, eps_ent: float = 0.0,
                       eps_ff: float = 0.0, W_ent: float = 1.0, W_ff: float = 1.0):
    """Bob's displacement scale and variance from the analytic forms.

    Lossless channels use the exact finite-gain expression with
    ``G_pm = (sqrt(G) +- 1/sqrt(G))**2``. With losses the large-gain form is
    used, which additionally assumes displacement matching.

    Returns
    -------
    (float, float)
        ``(d_scale, v_out)`` with ``d_Bob = d_scale * d_Alice``.
    """
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    if eps_ent == 0 and eps_ff == 0:
        g_plus = (math.sqrt(G) + 1 / math.sqrt(G)) ** 2
        g_minus = (math.sqrt(G) - 1 / math.sqrt(G)) ** 2
        d_scale = math.sqrt(g_plus * eta) / 2
        v_out = (g_plus * eta + (g_minus * eta + 4 * (1 - eta)) * c
                 - 4 * math.sqrt(g_minus * eta * (1 - eta)) * s) / 16
        return d_scale, v_out
    if G < 100:
        warnings.warn(f"large-gain output formula used at G = {G:.3g} < 100", stacklevel=2)
    d_scale = math.sqrt(G * eta * (1 - eps_ff)) / 2
    v_out = (1 + eps_ent * W_ent + eta * eps_ff * W_ff
             + (2 - eps_ent) * c - 2 * math.sqrt(1 - eps_ent) * s) / 4
    return d_scale, v_out


def fidelity_large_gain(r: float, eta: float = 0.0, eps_ff: float = 0.0, W_ff: float = 1.0) -> float:
    """Matched, large-gain fidelity with a lossless entanglement channel."""
    return 1.0 / (1.0 + math.exp(-2 * r) + eta * eps_ff * W_ff / 2)


def eve_attack(feedforward: GaussianState, eps_ff: float, W_ff: float):
    """Entangling-cloner attack on the feedforward channel.

    Eve injects one arm of a TMS state with noise factor ``W_ff`` through a
    beam splitter of reflectivity ``eps_ff`` and keeps both of her modes.

    Returns
    -------
    (GaussianState, GaussianState)
        Eve's two-mode state and the attenuated feedforward mode sent on to Bob.
    """
    if feedforward.n_modes != 1:
        raise ValueError("feedforward state must be single-mode")
    if not 0.0 <= eps_ff <= 1.0:
        raise ConfigError(f"eps_ff must lie in [0, 1], got {eps_ff}")
    if W_ff < 1.0:
        raise PhysicsError(f"noise factor W_ff must be >= 1, got {W_ff}")
    d = np.zeros(6)
    d[0:2] = feedforward.d
    V = np.zeros((6, 6))
    V[0:2, 0:2] = feedforward.V
    V[2:4, 2:4] = V[4:6, 4:6] = W_ff / 4 * I2
    corr = math.sqrt(W_ff * W_ff - 1) / 4 * np.diag([1.0, -1.0])
    V[2:4, 4:6] = V[4:6, 2:4] = corr
    a, b = math.sqrt(1 - eps_ff), math.sqrt(eps_ff)
    E = np.block([[a * I2, b * I2, Z2], [-b * I2, a * I2, Z2], [Z2, Z2, I2]])
    joint = apply(SymplecticOp(E, "E"), GaussianState(d, V))
    joint.check_physical(where="eve attack")
    return extract_modes(joint, [1, 2]), extract_modes(joint, [0])
