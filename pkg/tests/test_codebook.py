from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvteleport.codebook import (
    GaussianCodebook,
    TruncatedGaussianCodebook,
    TruncatedUniformCodebook,
    average,
    parse_codebook,
    sample,
)
from cvteleport.errors import ConfigError

CODEBOOKS = [
    GaussianCodebook(1.0),
    GaussianCodebook(0.01),
    TruncatedUniformCodebook(10.0),
    TruncatedGaussianCodebook(1.0, 10.0),
    TruncatedGaussianCodebook(5.0, 0.3),
    TruncatedGaussianCodebook(0.1, 100.0),
]


class TestDensity:
    def test_gaussian_peak(self):
        assert GaussianCodebook(1.0).density(0j) == pytest.approx(1 / (2 * math.pi))

    def test_uniform_support(self):
        cb = TruncatedUniformCodebook(4.0)
        assert cb.density(math.sqrt(5) + 0j) == 0.0
        assert cb.density(1j) == pytest.approx(1 / (4 * math.pi))

    def test_truncated_gaussian_approaches_gaussian(self):
        a = np.array([0.0, 0.5 + 0.5j, 1.5, 2j])
        full = GaussianCodebook(1.0).density(a)
        for N, tol in [(10.0, 1e-2), (40.0, 1e-9), (200.0, 1e-15)]:
            np.testing.assert_allclose(TruncatedGaussianCodebook(1.0, N).density(a), full, atol=tol)

    def test_truncated_gaussian_approaches_uniform(self):
        N = 3.0
        a = np.array([0.0, 0.5 + 0.5j, 1.5, 1.7j])
        diff = TruncatedGaussianCodebook(1e6 * N, N).density(a) - TruncatedUniformCodebook(N).density(a)
        assert np.max(np.abs(diff)) < 1e-4

    def test_normaliser_is_positive(self):
        cb = TruncatedGaussianCodebook(2.0, 1.0)
        assert cb._mass == pytest.approx(1 - math.exp(-0.25))

    @pytest.mark.parametrize("args", [(0.0,), (-1.0,), (math.inf,)])
    def test_gaussian_validation(self, args):
        with pytest.raises(ConfigError):
            GaussianCodebook(*args)

    def test_truncated_validation(self):
        with pytest.raises(ConfigError):
            TruncatedGaussianCodebook(1.0, 0.0)
        with pytest.raises(ConfigError):
            TruncatedUniformCodebook(-2.0)


class TestAverage:
    @pytest.mark.parametrize("cb", CODEBOOKS, ids=lambda c: c.spec)
    def test_normalisation(self, cb):
        assert average(cb, lambda a: np.ones(a.shape)) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("cb", CODEBOOKS, ids=lambda c: c.spec)
    def test_mean_photons(self, cb):
        assert average(cb, lambda a: np.abs(a) ** 2) == pytest.approx(cb.mean_photons, rel=1e-9)

    def test_moment_values(self):
        assert TruncatedUniformCodebook(6.0).mean_photons == 3.0
        assert GaussianCodebook(1.5).mean_photons == 3.0
        # overflow-safe limits of the truncated exponential mean
        assert TruncatedGaussianCodebook(1.0, 1e-12).mean_photons == pytest.approx(5e-13)
        assert TruncatedGaussianCodebook(1.0, 1e5).mean_photons == 2.0

    @pytest.mark.parametrize("cb", CODEBOOKS, ids=lambda c: c.spec)
    @pytest.mark.parametrize("c", [0.0, 0.05, 0.4, 3.0])
    def test_laplace_transform(self, cb, c):
        got = average(cb, lambda a: np.exp(-c * np.abs(a) ** 2))
        assert got == pytest.approx(cb.laplace(c), rel=1e-10)

    def test_non_isotropic(self):
        cb = GaussianCodebook(0.7)
        # E[Re(alpha)^2] = sigma2
        got = average(cb, lambda a: a.real**2, isotropic=False)
        assert got == pytest.approx(0.7, rel=1e-9)

    def test_linear_in_f(self):
        cb = TruncatedGaussianCodebook(1.0, 4.0)
        f = lambda a: np.abs(a) ** 2  # noqa: E731
        g = lambda a: np.cos(np.abs(a))  # noqa: E731
        lhs = average(cb, lambda a: 2 * f(a) - 3 * g(a))
        assert lhs == pytest.approx(2 * average(cb, f) - 3 * average(cb, g), rel=1e-10)

    @given(st.floats(0.01, 50), st.floats(0.01, 500))
    def test_normalisation_grid(self, s2, N):
        cb = TruncatedGaussianCodebook(s2, N)
        assert average(cb, lambda a: np.ones(a.shape)) == pytest.approx(1.0, abs=1e-9)


class TestSampling:
    def test_uniform_support(self):
        a = sample(TruncatedUniformCodebook(2.0), 7, 5000)
        assert np.all(np.abs(a) ** 2 <= 2.0)

    @pytest.mark.parametrize("cb", [TruncatedGaussianCodebook(1.0, 3.0), TruncatedGaussianCodebook(10.0, 0.5)],
                             ids=lambda c: c.spec)
    def test_truncated_support_and_mean(self, cb):
        a = sample(cb, 11, 40000)
        x = np.abs(a) ** 2
        assert np.all(x <= cb.N)
        assert x.mean() == pytest.approx(cb.mean_photons, abs=4 * x.std() / math.sqrt(x.size))

    def test_gaussian_second_moment(self):
        x = np.abs(sample(GaussianCodebook(1.0), 2024, 100_000)) ** 2
        assert x.mean() == pytest.approx(2.0, abs=0.05)

    def test_deterministic(self):
        cb = TruncatedGaussianCodebook(1.0, 2.0)
        np.testing.assert_array_equal(sample(cb, 5, 100), sample(cb, 5, 100))
        assert not np.array_equal(sample(cb, 5, 100), sample(cb, 6, 100))


class TestParse:
    @pytest.mark.parametrize("spec, cb", [
        ("gaussian:sigma2=1", GaussianCodebook(1.0)),
        ("truncuniform:N=10", TruncatedUniformCodebook(10.0)),
        ("truncgaussian:sigma2=1,N=10", TruncatedGaussianCodebook(1.0, 10.0)),
        (" TruncGaussian: N=2 , sigma2=0.5", TruncatedGaussianCodebook(0.5, 2.0)),
    ])
    def test_round_trip(self, spec, cb):
        assert parse_codebook(spec) == cb
        assert parse_codebook(cb.spec) == cb

    @pytest.mark.parametrize("spec", ["poisson:N=1", "gaussian:N=1", "gaussian", "truncuniform:N=x",
                                      "truncgaussian:sigma2=1", "gaussian:sigma2"])
    def test_errors(self, spec):
        with pytest.raises(ConfigError):
            parse_codebook(spec)
