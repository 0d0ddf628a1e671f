"""Acceptance criteria 1-9.

Every test records one PASS/FAIL line, printed in the terminal summary, and
then asserts the same condition.
"""

from __future__ import annotations

import csv
import math
import time

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from cvteleport.codebook import GaussianCodebook, TruncatedGaussianCodebook, TruncatedUniformCodebook
from cvteleport.nocloning import BREAKPOINT, gaussian_threshold_closed_form, threshold
from cvteleport.recipes import get_recipe, reproduce
from cvteleport.security import (
    holevo_gaussian,
    holevo_numeric,
    minimum_secure_squeezing,
    mutual_information_gaussian,
    mutual_information_numeric,
    secure_fidelity,
    truncated_output_density,
)
from cvteleport.teleport import ENT_SEGMENT, FF_SEGMENT, N_SEGMENTS, TeleportConfig, run_chain
from cvteleport.units import db_from_squeeze_factor, gain_from_db, squeeze_factor_from_db

from conftest import ACCEPTANCE
from helpers import large_gain_fidelity, temperature_for_noise_factor
from test_security import convolution_oracle


def record(n: int, ok: bool, detail: str) -> bool:
    ACCEPTANCE[n] = (bool(ok), detail)
    return bool(ok)


def _segment(index: int, value: float, default: float = 0.0) -> tuple[float, ...]:
    out = [default] * N_SEGMENTS
    out[index - 1] = value
    return tuple(out)


def _rows(path):
    with open(path, newline="") as fh:
        return [[float(x) for x in row] for row in list(csv.reader(fh))[1:]]


def test_criterion_1_chain_matches_large_gain_formula():
    t0 = time.perf_counter()
    G, worst = 1e4, 0.0
    for s_db in (0, 5, 10, 15, 20):
        r = squeeze_factor_from_db(s_db)
        for eps in (0.0, 0.3, 0.6, 0.9):
            eta = 4 / (G * (1 - eps))
            for W in (1, 10, 100):
                cfg = TeleportConfig(squeeze_r=r, gain=G, coupling=eta, losses=_segment(FF_SEGMENT, eps),
                                     bath_temps=_segment(FF_SEGMENT, temperature_for_noise_factor(W)))
                F = run_chain(cfg).fidelity
                worst = max(worst, abs(F - large_gain_fidelity(r, eta, eps, W)))
    elapsed = time.perf_counter() - t0
    ok = record(1, worst < 1e-3 and elapsed < 5, f"max |dF| = {worst:.2e}, {elapsed:.2f} s")
    assert ok


def test_criterion_2_classical_and_nocloning_anchors():
    F = run_chain(TeleportConfig(squeeze_r=0.0, coupling=1e-9).matched()).fidelity
    f_nc = threshold(GaussianCodebook(1e6)).f_nc
    ok = record(2, abs(F - 0.5) < 1e-6 and abs(f_nc - 2 / 3) < 1e-4,
                f"F(S=0) = {F:.9f}, F_nc(1e6) = {f_nc:.6f}")
    assert ok


def test_criterion_3_gaussian_threshold_oracle():
    t0 = time.perf_counter()
    s2 = np.geomspace(0.01, 1e3, 50)
    worst = max(abs(threshold(GaussianCodebook(s)).f_nc - gaussian_threshold_closed_form(s)) for s in s2)
    s = BREAKPOINT
    upper, lower = (4 * s + 2) / (6 * s + 1), 1 / ((3 - 2 * math.sqrt(2)) * s + 1)
    at_break = abs(threshold(GaussianCodebook(s)).f_nc - upper)
    continuous = abs(upper - lower) < 1e-12 and abs(upper - 0.82843) < 1e-5 and at_break < 1e-4
    elapsed = time.perf_counter() - t0
    ok = record(3, worst < 1e-4 and continuous and elapsed < 30,
                f"max |dF| = {worst:.2e}, breakpoint {upper:.6f}/{lower:.6f}, {elapsed:.2f} s")
    assert ok


def test_criterion_4_truncated_limits():
    gauss = max(abs(threshold(TruncatedGaussianCodebook(s, 1e4 * s)).f_nc - gaussian_threshold_closed_form(s))
                for s in (0.1, 1.0, 10.0, 100.0))
    unif = max(abs(threshold(TruncatedGaussianCodebook(1e6 * n, n)).f_nc
                   - threshold(TruncatedUniformCodebook(n)).f_nc) for n in (0.1, 1.0, 10.0, 100.0))
    tiny = threshold(TruncatedGaussianCodebook(1.0, 1e-3)).f_nc
    axis = np.geomspace(1e-2, 1e2, 21)
    F = np.array([[threshold(TruncatedGaussianCodebook(s, n)).f_nc for s in axis] for n in axis])
    monotone = bool(np.all(np.diff(F, axis=0) <= 1e-10) and np.all(np.diff(F, axis=1) <= 1e-10))
    ok = record(4, gauss < 1e-3 and unif < 1e-3 and tiny > 0.99 and monotone,
                f"Gaussian limit {gauss:.1e}, uniform limit {unif:.1e}, F_nc(N=1e-3) = {tiny:.5f}, "
                f"monotone 21x21 = {monotone}")
    assert ok


def test_criterion_5_security_anchors():
    t0 = time.perf_counter()
    s_min = minimum_secure_squeezing(math.inf)
    f0 = secure_fidelity(0.0, math.inf, 0.5).fidelity
    worst = 0.0
    for s_db in np.linspace(2.39, 20, 25):
        r = squeeze_factor_from_db(s_db)
        worst = max(worst, abs(secure_fidelity(r, math.inf, 0.5).fidelity - 2 / (2 + math.cosh(2 * r))))
    elapsed = time.perf_counter() - t0
    ok = record(5, abs(s_min - 2.39) <= 0.02 and abs(f0 - 2 / 3) < 1e-3 and worst < 1e-3 and elapsed < 60,
                f"S_min = {s_min:.4f} dB, F_s(0) = {f0:.6f}, max |dF_s| = {worst:.1e}, {elapsed:.2f} s")
    assert ok


def test_criterion_6_information_pipeline_oracles():
    t0 = time.perf_counter()
    mi = max(abs(mutual_information_numeric(GaussianCodebook(s), 1.0, v) - mutual_information_gaussian(s, 1.0, v))
             for s in np.geomspace(0.01, 100, 9) for v in (0.3, 1.0))
    chi = max(abs(holevo_numeric(GaussianCodebook(s), r) - holevo_gaussian(s, r))
              for s in np.geomspace(0.01, 100, 9) for r in (0.3, 1.0))
    k, v = 1.0, 0.6
    dens = 0.0
    for s2 in np.geomspace(0.2, 5, 5):
        for N in np.geomspace(0.2, 5, 5):
            for b in np.linspace(0.0, 3.0, 5):
                dens = max(dens, abs(truncated_output_density(b, s2, N, k, v) - convolution_oracle(b, s2, N, k, v)))
    elapsed = time.perf_counter() - t0
    ok = record(6, mi < 1e-4 and chi < 1e-4 and dens < 1e-8 and elapsed < 120,
                f"MI {mi:.1e}, Holevo {chi:.1e}, Phi3 density {dens:.1e} (125 points), {elapsed:.1f} s")
    assert ok


def test_criterion_7_codebook_shape_independence():
    G, worst = gain_from_db(40), 0.0
    for s_db in (4, 8, 12):
        r = squeeze_factor_from_db(s_db)
        ref = secure_fidelity(r, G, 0.5).fidelity
        for ratio in (0.1, 1, 10, 100):
            got = secure_fidelity(r, G, 0.5, cb=TruncatedGaussianCodebook(1.0, ratio)).fidelity
            worst = max(worst, abs(got - ref))
    ok = record(7, worst < 1e-3, f"max |F_s(trunc) - F_s(Gaussian)| = {worst:.1e}")
    assert ok


def test_criterion_8_optimal_squeezing_condition():
    worst, found = 0.0, []
    for eps in (0.05, 0.1, 0.2):
        def neg_fidelity(s_db):
            cfg = TeleportConfig(squeeze_r=squeeze_factor_from_db(s_db), coupling=1e-6,
                                 losses=_segment(ENT_SEGMENT, eps)).matched()
            return -run_chain(cfg).fidelity

        s_opt = minimize_scalar(neg_fidelity, bounds=(0.0, 40.0), method="bounded",
                                options={"xatol": 1e-6}).x
        target = db_from_squeeze_factor(math.acosh(eps**-0.5) / 2)
        found.append(f"eps={eps}: {s_opt:.2f} vs {target:.2f} dB")
        worst = max(worst, abs(s_opt - target))
    ok = record(8, worst < 0.05, "; ".join(found))
    assert ok


def test_criterion_9_figure_shapes(tmp_path):
    reproduce(get_recipe("fig2a").resized(21, 41), tmp_path)
    rows = _rows(tmp_path / "fig2a.csv")
    t10 = min(t for _, t, _ in rows if t >= 10.0)
    best2a = max(f for _, t, f in rows if t == t10)
    reproduce(get_recipe("fig3c").resized(31, 11), tmp_path)
    rows = _rows(tmp_path / "fig3c.csv")
    hot = [(c, f) for c, t, f in rows if t == pytest.approx(300.0) and c <= -24]
    best3c = max(f for _, f in hot)
    ok = record(9, best2a > 2 / 3 and best3c > 0.5,
                f"fig2a max F at T_ff = {t10:.2f} K is {best2a:.4f}; "
                f"fig3c max F at 300 K, eta <= -24 dB is {best3c:.4f}")
    assert ok
