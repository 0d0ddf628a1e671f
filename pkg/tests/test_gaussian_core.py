from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvteleport.errors import PhysicsError
from cvteleport.gaussian_core import (
    GaussianState,
    SymplecticOp,
    apply,
    coherent,
    differential_entropy_gaussian,
    extract_modes,
    symplectic_eigenvalues,
    symplectic_form,
    tensor,
    thermal,
    uhlmann_fidelity,
    vacuum,
    von_neumann_entropy,
)
from cvteleport.teleport import beam_splitter_12


def rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def squeezer(r):
    return np.diag([math.exp(-r), math.exp(r)])


def blockdiag(*blocks):
    n = sum(b.shape[0] for b in blocks)
    M = np.zeros((n, n))
    i = 0
    for b in blocks:
        M[i : i + b.shape[0], i : i + b.shape[0]] = b
        i += b.shape[0]
    return M


def two_mode_squeezed(r):
    """Two orthogonally squeezed vacua on a balanced beam splitter."""
    S = blockdiag(squeezer(r), squeezer(-r))
    h = math.sqrt(0.5)
    B = np.block([[h * np.eye(2), h * np.eye(2)], [-h * np.eye(2), h * np.eye(2)]])
    return apply(SymplecticOp(B @ S), vacuum(2))


# random single-mode physical states: thermal x squeezer x rotation, displaced
single_modes = st.builds(
    lambda n, r, th, x, y: GaussianState(
        np.array([x, y]),
        rotation(th) @ squeezer(r) @ ((2 * n + 1) / 4 * np.eye(2)) @ squeezer(r).T @ rotation(th).T,
    ),
    st.floats(0, 5), st.floats(-1.2, 1.2), st.floats(0, math.pi),
    st.floats(-3, 3), st.floats(-3, 3),
)


class TestStates:
    def test_vacuum(self):
        s = vacuum(3)
        assert s.n_modes == 3
        np.testing.assert_array_equal(s.V, 0.25 * np.eye(6))
        assert s.is_physical()

    def test_coherent_displacement_in_pq_order(self):
        s = coherent(1 + 2j)
        np.testing.assert_array_equal(s.d, [1.0, 2.0])

    def test_thermal_variance(self):
        np.testing.assert_allclose(thermal(1.0).V, 0.75 * np.eye(2))

    def test_subvacuum_state_is_unphysical(self):
        s = GaussianState(np.zeros(2), 0.2 * np.eye(2))
        assert not s.is_physical()
        with pytest.raises(PhysicsError):
            s.check_physical()

    def test_asymmetric_covariance_rejected(self):
        with pytest.raises(ValueError):
            GaussianState(np.zeros(2), np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_non_finite_rejected(self):
        with pytest.raises(PhysicsError):
            GaussianState(np.zeros(2), np.array([[np.inf, 0.0], [0.0, 1.0]]))

    def test_states_are_immutable(self):
        s = vacuum()
        with pytest.raises(ValueError):
            s.V[0, 0] = 1.0

    def test_tensor_order(self):
        s = tensor(vacuum(), thermal(2.0, 1j))
        np.testing.assert_allclose(s.V, np.diag([0.25, 0.25, 1.25, 1.25]))
        np.testing.assert_allclose(s.d, [0, 0, 0, 1])


class TestApply:
    def test_identity_on_vacuum(self):
        out = apply(SymplecticOp(np.eye(4)), vacuum(2))
        np.testing.assert_array_equal(out.V, vacuum(2).V)

    def test_beam_splitter_twice(self):
        # 3-mode chain convention; M^2 maps (a, b) -> (b, -a) on modes 1, 2
        M = beam_splitter_12()
        s = tensor(thermal(1.0, 1 + 0j), thermal(3.0, 2j), vacuum())
        op = SymplecticOp(M)
        out = apply(op, apply(op, s))
        np.testing.assert_allclose(M @ M, np.block([
            [np.zeros((2, 2)), np.eye(2), np.zeros((2, 2))],
            [-np.eye(2), np.zeros((2, 2)), np.zeros((2, 2))],
            [np.zeros((2, 2)), np.zeros((2, 2)), np.eye(2)]]), atol=1e-15)
        np.testing.assert_allclose(out.V[0:2, 0:2], 1.75 * np.eye(2))
        np.testing.assert_allclose(out.V[2:4, 2:4], 0.75 * np.eye(2))
        np.testing.assert_allclose(out.d[0:4], [0, 2, -1, 0], atol=1e-15)

    def test_full_loss_replaces_mode_by_bath(self):
        W = 7.0
        op = SymplecticOp(blockdiag(np.eye(2), np.zeros((2, 2))), losses=(0.0, 1.0))
        noise = blockdiag(np.zeros((2, 2)), W / 4 * np.eye(2))
        out = apply(op, tensor(thermal(1.0), coherent(3 + 0j)), noise)
        np.testing.assert_allclose(out.V[2:4, 2:4], W / 4 * np.eye(2))
        np.testing.assert_allclose(out.d[2:4], 0.0)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            apply(SymplecticOp(np.eye(4)), vacuum(1))

    def test_asymmetric_noise_rejected(self):
        with pytest.raises(ValueError):
            apply(SymplecticOp(np.eye(2)), vacuum(), np.array([[0.0, 1.0], [0.0, 0.0]]))

    @given(st.floats(-2, 2), st.floats(0, math.pi))
    def test_squeezer_and_rotation_preserve_det(self, r, th):
        s = thermal(0.7)
        for M in (squeezer(r), rotation(th)):
            out = apply(SymplecticOp(M), s)
            assert np.linalg.det(out.V) == pytest.approx(np.linalg.det(s.V), rel=1e-12)
            assert SymplecticOp(M).is_symplectic()

    def test_loss_matrix_is_not_symplectic(self):
        assert not SymplecticOp(0.5 * np.eye(2)).is_symplectic()


class TestFidelity:
    def test_identical_coherent(self):
        assert uhlmann_fidelity(coherent(1 - 2j), coherent(1 - 2j)) == pytest.approx(1.0, abs=1e-15)

    def test_vacuum_vs_thermal(self):
        assert uhlmann_fidelity(vacuum(), thermal(1.0)) == pytest.approx(0.5, abs=1e-14)

    @pytest.mark.parametrize("n", [0.1, 1.0, 4.0, 30.0])
    def test_pure_vs_thermal_closed_form(self, n):
        assert uhlmann_fidelity(vacuum(), thermal(n)) == pytest.approx(1 / (n + 1), rel=1e-12)

    @pytest.mark.parametrize("dist2, expected", [(math.log(2), 0.5), (math.log(2) / 2, 1 / math.sqrt(2))])
    def test_displaced_vacua(self, dist2, expected):
        # coherent-state overlap is exp(-|a1 - a2|^2)
        a = math.sqrt(dist2)
        assert uhlmann_fidelity(coherent(0j), coherent(complex(a))) == pytest.approx(expected, rel=1e-12)

    def test_multimode_rejected(self):
        with pytest.raises(ValueError):
            uhlmann_fidelity(vacuum(2), vacuum(2))

    def test_unphysical_rejected(self):
        with pytest.raises(PhysicsError):
            uhlmann_fidelity(GaussianState(np.zeros(2), 0.1 * np.eye(2)), vacuum())

    @given(single_modes, single_modes)
    def test_symmetric_and_bounded(self, a, b):
        f_ab, f_ba = uhlmann_fidelity(a, b), uhlmann_fidelity(b, a)
        assert f_ab == pytest.approx(f_ba, abs=1e-12)
        assert 0.0 <= f_ab <= 1.0

    @given(st.floats(-1.5, 1.5), st.floats(0, math.pi), st.complex_numbers(max_magnitude=3))
    def test_pure_self_fidelity(self, r, th, alpha):
        M = rotation(th) @ squeezer(r)
        s = GaussianState(np.array([alpha.real, alpha.imag]), M @ (0.25 * np.eye(2)) @ M.T)
        assert uhlmann_fidelity(s, s) == pytest.approx(1.0, abs=1e-12)


class TestModes:
    def test_extract_first(self):
        s = extract_modes(tensor(vacuum(), thermal(2.0)), [0])
        np.testing.assert_array_equal(s.V, vacuum().V)

    def test_extract_swaps(self):
        s = tensor(vacuum(), thermal(2.0, 1j))
        out = extract_modes(s, [1, 0])
        np.testing.assert_allclose(out.V, np.diag([1.25, 1.25, 0.25, 0.25]))
        np.testing.assert_allclose(out.d, [0, 1, 0, 0])

    def test_tms_keeps_correlations(self):
        r = 0.8
        s = extract_modes(two_mode_squeezed(r), [0, 1])
        np.testing.assert_allclose(np.abs(s.V[0:2, 2:4]), math.sinh(2 * r) / 4 * np.eye(2), atol=1e-14)
        np.testing.assert_allclose(s.V[0:2, 0:2], math.cosh(2 * r) / 4 * np.eye(2), atol=1e-14)

    @pytest.mark.parametrize("modes, exc", [([0, 0], ValueError), ([2], IndexError)])
    def test_bad_indices(self, modes, exc):
        with pytest.raises(exc):
            extract_modes(vacuum(2), modes)

    def test_embed_then_extract_is_identity(self):
        s = thermal(0.3, 2 - 1j)
        np.testing.assert_allclose(extract_modes(tensor(vacuum(), s, thermal(4.0)), [1]).V, s.V)


class TestEntropy:
    def test_vacuum_spectrum(self):
        np.testing.assert_allclose(symplectic_eigenvalues(vacuum(3).V), [0.25] * 3)

    def test_thermal_spectrum(self):
        np.testing.assert_allclose(symplectic_eigenvalues(thermal(1.0).V), [0.75])

    def test_tms_is_pure(self):
        V = two_mode_squeezed(1.1).V
        np.testing.assert_allclose(symplectic_eigenvalues(V), [0.25, 0.25], atol=1e-12)
        assert von_neumann_entropy(V) == pytest.approx(0.0, abs=1e-10)

    def test_vacuum_entropy(self):
        assert von_neumann_entropy(vacuum(2).V) == 0.0

    def test_thermal_entropy(self):
        assert von_neumann_entropy(thermal(1.0).V) == pytest.approx(2 * math.log(2), rel=1e-13)

    def test_symplectic_form_square(self):
        O = symplectic_form(2)
        np.testing.assert_array_equal(O @ O, -np.eye(4))

    @given(st.floats(-1.5, 1.5), st.floats(0, math.pi), st.floats(0, 3), st.floats(0, 3))
    def test_spectrum_invariant_under_symplectic_maps(self, r, th, n1, n2):
        V = tensor(thermal(n1), thermal(n2)).V
        h = math.sqrt(0.5)
        B = np.block([[h * np.eye(2), h * np.eye(2)], [-h * np.eye(2), h * np.eye(2)]])
        M = B @ blockdiag(rotation(th) @ squeezer(r), squeezer(-r))
        np.testing.assert_allclose(symplectic_eigenvalues(M @ V @ M.T), symplectic_eigenvalues(V),
                                   atol=1e-9, rtol=1e-9)

    @given(st.floats(0, 50), st.floats(1e-3, 5))
    def test_entropy_increases_with_occupation(self, n, dn):
        assert von_neumann_entropy(thermal(n + dn).V) > von_neumann_entropy(thermal(n).V)

    def test_differential_entropy_unit_argument(self):
        assert differential_entropy_gaussian(1 / (2 * math.pi * math.e)) == pytest.approx(0.0, abs=1e-15)

    def test_differential_entropy_ratio(self):
        d = differential_entropy_gaussian(0.6) - differential_entropy_gaussian(0.3)
        assert d == pytest.approx(math.log(2), rel=1e-14)

    def test_differential_entropy_eve_at_zero_squeezing(self):
        v_eve = 0.5
        d = differential_entropy_gaussian(v_eve + 1.0) - differential_entropy_gaussian(v_eve)
        assert d == pytest.approx(math.log(3), rel=1e-14)

    def test_differential_entropy_matrix_form(self):
        V = np.diag([0.3, 0.3])
        assert differential_entropy_gaussian(V) == pytest.approx(differential_entropy_gaussian(0.3))

    @pytest.mark.parametrize("v", [0.0, -1.0])
    def test_differential_entropy_domain(self, v):
        with pytest.raises((ValueError, PhysicsError)):
            differential_entropy_gaussian(v)
