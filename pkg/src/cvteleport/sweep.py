"""Two-axis parameter sweeps with deterministic CSV output.

A sweep point is a flat mapping of parameter names to values: teleportation
keys (see :mod:`cvteleport.config`), codebook keys (``codebook``, ``sigma2``,
``N``, ``n_over_sigma2``) and security keys (``pipeline``). The grid is
evaluated row-major with ``axis1`` outermost; with ``threads > 1`` points are
farmed out to a process pool but written back in grid order.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .codebook import (
    Codebook,
    GaussianCodebook,
    TruncatedGaussianCodebook,
    TruncatedUniformCodebook,
    parse_codebook,
)
from .config import config_from_mapping, is_config_key
from .errors import ConfigError
from .nocloning import threshold
from .security import finite_parameter_point, secure_fidelity
from .teleport import run_chain

__all__ = ["Axis", "SweepGrid", "QUANTITIES", "evaluate_point", "run_sweep", "format_csv"]

QUANTITIES = ("fidelity", "f_nc", "mutual_information", "holevo", "secure_fidelity")
CODEBOOK_KEYS = frozenset({"codebook", "sigma2", "N", "n_over_sigma2"})
SECURITY_KEYS = frozenset({"pipeline"})
INSECURE = -1.0


def is_parameter(name: str) -> bool:
    return is_config_key(name) or name in CODEBOOK_KEYS or name in SECURITY_KEYS


@dataclass(frozen=True)
class Axis:
    """A named list of grid values; ``scale`` records how they were spaced."""

    name: str
    values: tuple[float, ...]
    scale: str = "list"

    def __post_init__(self):
        if not is_parameter(self.name):
            raise ConfigError(f"unknown sweep parameter {self.name!r}")
        vals = tuple(float(v) for v in self.values)
        if len(vals) < 1 or not all(math.isfinite(v) for v in vals):
            raise ConfigError(f"axis {self.name}: values must be finite and non-empty")
        object.__setattr__(self, "values", vals)

    @classmethod
    def span(cls, name: str, lo: float, hi: float, count: int, scale: str = "lin") -> "Axis":
        """``count`` points from ``lo`` to ``hi``; ``scale`` is lin, log or db.

        ``db`` spaces linear-unit endpoints evenly in decibels, which is the
        same as ``log``.
        """
        if count < 2:
            raise ConfigError(f"axis {name}: count must be >= 2, got {count}")
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ConfigError(f"axis {name}: endpoints must be finite")
        scale = scale.lower()
        if scale == "lin":
            vals = np.linspace(lo, hi, count)
        elif scale in ("log", "db"):
            if lo <= 0 or hi <= 0:
                raise ConfigError(f"axis {name}: log spacing needs positive endpoints")
            vals = np.geomspace(lo, hi, count)
        else:
            raise ConfigError(f"axis {name}: unknown scale {scale!r}")
        return cls(name, tuple(vals), scale)

    @classmethod
    def parse(cls, spec: str) -> "Axis":
        """``name=lo:hi:count[:lin|log|db]`` or ``name=v1,v2,...``."""
        name, eq, rest = spec.partition("=")
        name = name.strip()
        if not eq or not rest.strip():
            raise ConfigError(f"axis spec {spec!r} must look like name=lo:hi:count[:scale]")
        try:
            if ":" in rest:
                parts = rest.split(":")
                if len(parts) not in (3, 4):
                    raise ConfigError(f"axis spec {spec!r}: expected lo:hi:count[:scale]")
                scale = parts[3] if len(parts) == 4 else "lin"
                return cls.span(name, float(parts[0]), float(parts[1]), int(parts[2]), scale)
            return cls(name, tuple(float(v) for v in rest.split(",")))
        except ValueError:
            raise ConfigError(f"axis spec {spec!r}: malformed number") from None

    def with_count(self, count: int) -> "Axis":
        """Same endpoints and spacing at a different resolution.

        Explicit value lists are returned unchanged.
        """
        if self.scale == "list":
            return self
        return Axis.span(self.name, self.values[0], self.values[-1], count, self.scale)


@dataclass(frozen=True)
class SweepGrid:
    axis1: Axis
    axis2: Axis
    quantity: str
    fixed: Mapping[str, object] = field(default_factory=dict)
    preset: str | None = None

    def __post_init__(self):
        if self.axis1.name == self.axis2.name:
            raise ConfigError(f"both axes sweep {self.axis1.name!r}")
        if self.quantity not in QUANTITIES:
            raise ConfigError(f"unknown quantity {self.quantity!r}; choose from {QUANTITIES}")
        for key in self.fixed:
            if not is_parameter(key):
                raise ConfigError(f"unknown parameter {key!r}")

    def points(self) -> list[dict]:
        out = []
        for a in self.axis1.values:
            for b in self.axis2.values:
                p = {"preset": self.preset} if self.preset else {}
                p.update(self.fixed)
                p[self.axis1.name] = a
                p[self.axis2.name] = b
                out.append(p)
        return out


def _split(point: Mapping[str, object]):
    cfg_keys, cb_keys, sec_keys = {}, {}, {}
    for k, v in point.items():
        if k == "preset" and v is None:
            continue
        if k in CODEBOOK_KEYS:
            cb_keys[k] = v
        elif k in SECURITY_KEYS:
            sec_keys[k] = v
        else:
            cfg_keys[k] = v
    return cfg_keys, cb_keys, sec_keys


def codebook_from_params(params: Mapping[str, object]) -> Codebook:
    """Codebook from ``codebook`` (kind or full spec), ``sigma2``, ``N``, ``n_over_sigma2``.

    Without an explicit kind, a cutoff alone means truncated uniform, a cutoff
    with ``sigma2`` means truncated Gaussian, and anything else Gaussian
    (``sigma2 = 1`` by default).
    """
    if "codebook" in params:
        kind = str(params["codebook"])
    elif "n_over_sigma2" in params or ("N" in params and "sigma2" in params):
        kind = "truncgaussian"
    elif "N" in params:
        kind = "truncuniform"
    else:
        kind = "gaussian"
    if ":" in kind:
        return parse_codebook(kind)
    sigma2 = float(params["sigma2"]) if "sigma2" in params else None
    N = float(params["N"]) if "N" in params else None
    if "n_over_sigma2" in params:
        if sigma2 is None:
            sigma2 = 1.0
        N = float(params["n_over_sigma2"]) * sigma2
    if kind == "gaussian":
        return GaussianCodebook(1.0 if sigma2 is None else sigma2)
    if kind == "truncuniform":
        if N is None:
            raise ConfigError("truncuniform codebook needs N")
        return TruncatedUniformCodebook(N)
    if kind == "truncgaussian":
        if N is None or sigma2 is None:
            raise ConfigError("truncgaussian codebook needs sigma2 and N")
        return TruncatedGaussianCodebook(sigma2, N)
    raise ConfigError(f"unknown codebook kind {kind!r}")


def security_arguments(cfg_keys: Mapping[str, object]):
    """``(r, G, eps_ff, T_ff, frequency)`` from teleportation keys (matching implied)."""
    cfg = config_from_mapping({**cfg_keys, "match_gain": "false"})
    return cfg.squeeze_r, cfg.gain, cfg.eps_ff, cfg.temp_ff, cfg.frequency


def evaluate_point(quantity: str, point: Mapping[str, object]) -> float:
    """Value of ``quantity`` at one parameter point.

    Security quantities always use the displacement-matched coupling for the
    given gain. ``secure_fidelity`` returns -1 where no secure operating
    point exists and NaN where every bath temperature is secure.
    """
    cfg_keys, cb_keys, sec_keys = _split(point)
    if quantity == "fidelity":
        return float(run_chain(config_from_mapping(cfg_keys)).fidelity)
    cb = codebook_from_params(cb_keys)
    if quantity == "f_nc":
        return threshold(cb).f_nc
    pipeline = str(sec_keys.get("pipeline", "differential"))
    r, G, eps_ff, T_ff, freq = security_arguments(cfg_keys)
    if quantity == "secure_fidelity":
        res = secure_fidelity(r, G, eps_ff, freq, cb, pipeline=pipeline)
        if res.status in ("never-secure", "unattainable"):
            return INSECURE
        return res.fidelity
    if math.isinf(G):
        raise ConfigError(f"{quantity} needs a finite gain")
    p = finite_parameter_point(r, G, eps_ff, T_ff, freq, cb, pipeline=pipeline)
    return p.mutual_information if quantity == "mutual_information" else p.holevo


def _evaluate(args):
    quantity, point = args
    return evaluate_point(quantity, point)


def run_sweep(grid: SweepGrid, threads: int | None = 1) -> list[tuple[float, float, float]]:
    """Evaluate ``grid``; rows are ``(axis1, axis2, value)`` in row-major order."""
    points = grid.points()
    jobs = [(grid.quantity, p) for p in points]
    if threads is None:
        threads = os.cpu_count() or 1
    if threads > 1 and len(jobs) > 1:
        chunk = max(1, len(jobs) // (4 * threads))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(_evaluate, jobs, chunksize=chunk))
    else:
        values = [_evaluate(j) for j in jobs]
    return [(p[grid.axis1.name], p[grid.axis2.name], v) for p, v in zip(points, values)]


def format_csv(grid: SweepGrid, rows: Sequence[tuple[float, float, float]]) -> str:
    """RFC 4180 CSV with LF line endings and ``%.9g`` numbers."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([grid.axis1.name, grid.axis2.name, grid.quantity])
    for a, b, v in rows:
        writer.writerow(["%.9g" % a, "%.9g" % b, "%.9g" % v])
    return buf.getvalue()
