"""Registered sweep recipes that regenerate the data behind each figure.

Each recipe binds one or more :class:`SweepGrid` objects. Ranged axes carry
their default resolution (101 points, 61 for the secure-fidelity map) and can
be resampled with :meth:`FigureRecipe.resized`; explicit value lists are kept
as they are.
"""

from __future__ import annotations

import json
import platform
import time
from dataclasses import dataclass, replace
from pathlib import Path

from . import __version__
from .errors import ConfigError
from .sweep import Axis, SweepGrid, format_csv, run_sweep

__all__ = ["FigureRecipe", "RECIPES", "get_recipe", "reproduce"]

DEFAULT_COUNT = 101
SECURE_MAP_COUNT = 61

_IDEAL = {"preset": "ideal", "frequency_ghz": 5.0, "alpha2": 10.0, "squeezing_db": 10.0,
          "eta_db": -20.0}
_SECURITY = {"squeezing_db": 5.0, "gain_db": 40.0, "sigma2": 1.0, "frequency_ghz": 5.0}
_EPS_FF_LIST = (0.1, 0.3, 0.5, 0.7, 0.9)


@dataclass(frozen=True)
class FigureRecipe:
    id: str
    grids: tuple[SweepGrid, ...]
    description: str

    def resized(self, count1: int, count2: int) -> "FigureRecipe":
        grids = tuple(
            replace(g, axis1=g.axis1.with_count(count1), axis2=g.axis2.with_count(count2))
            for g in self.grids
        )
        return replace(self, grids=grids)


def _span(name, lo, hi, count=DEFAULT_COUNT, scale="lin"):
    return Axis.span(name, lo, hi, count, scale)


def _recipe(id, description, *grids):
    return FigureRecipe(id, tuple(grids), description)


def _build() -> dict[str, FigureRecipe]:
    temps = dict(lo=1e-2, hi=300.0, scale="log")
    r = [
        _recipe("fig2a", "ideal chain, thermal feedforward channel",
                SweepGrid(_span("eps_ff_db", 0, 20), _span("temp_ff", **temps), "fidelity", _IDEAL)),
        _recipe("fig2b", "ideal chain, thermal entanglement channel",
                SweepGrid(_span("eps_ent_db", 0, 20), _span("temp_ent", **temps), "fidelity", _IDEAL)),
        _recipe("fig2c", "ideal chain, entanglement loss against squeezing (0 K bath)",
                SweepGrid(_span("eps_ent_db", 0, 20), _span("squeezing_db", 0, 20), "fidelity",
                          {k: v for k, v in _IDEAL.items() if k != "squeezing_db"})),
        _recipe("fig3a", "realistic chain at fixed gain, thermal feedforward channel",
                SweepGrid(_span("eps_ff_db", 0, 10), _span("temp_ff", **temps), "fidelity",
                          {"preset": "realistic"})),
        _recipe("fig3b", "realistic chain, coupling against gain",
                SweepGrid(_span("coupling_db", -30, -5), _span("gain_db", 10, 40), "fidelity",
                          {"preset": "realistic"})),
        _recipe("fig3c", "realistic chain, matched gain, coupling against feedforward bath",
                SweepGrid(_span("coupling_db", -40, -10), _span("temp_ff", **temps), "fidelity",
                          {"preset": "realistic", "match_gain": "true", "eps_ff_db": 1.0})),
        _recipe("fig5a", "truncated-Gaussian no-cloning threshold",
                SweepGrid(_span("N", 1e-3, 1e2, scale="log"), _span("sigma2", 1e-2, 1e2, scale="log"),
                          "f_nc", {"codebook": "truncgaussian"})),
        _recipe("fig5b", "threshold against variance at fixed cutoffs",
                SweepGrid(_span("sigma2", 1e-2, 1e3, scale="log"), Axis("N", (0.1, 1.0, 10.0, 100.0, 1e4)),
                          "f_nc", {"codebook": "truncgaussian"})),
        _recipe("fig5c", "threshold against cutoff at fixed variances",
                SweepGrid(_span("N", 1e-3, 1e3, scale="log"), Axis("sigma2", (0.1, 1.0, 10.0, 1e6)),
                          "f_nc", {"codebook": "truncgaussian"})),
        _recipe("fig6a", "Bob's mutual information and Eve's Holevo quantity",
                SweepGrid(_span("temp_ff", 1e-2, 1e4, scale="log"), Axis("eps_ff", _EPS_FF_LIST),
                          "mutual_information", _SECURITY),
                SweepGrid(_span("temp_ff", 1e-2, 1e4, scale="log"), Axis("eps_ff", _EPS_FF_LIST),
                          "holevo", _SECURITY)),
        _recipe("fig6b", "teleportation fidelity at the security operating points",
                SweepGrid(_span("temp_ff", 1e-2, 1e4, scale="log"), Axis("eps_ff", _EPS_FF_LIST),
                          "fidelity", {"squeezing_db": 5.0, "gain_db": 40.0, "match_coupling": "true",
                                       "frequency_ghz": 5.0})),
        _recipe("fig6c", "secure fidelity against squeezing and gain (-1 marks no secure point)",
                SweepGrid(_span("squeezing_db", 0, 20, SECURE_MAP_COUNT),
                          _span("gain_db", 10, 60, SECURE_MAP_COUNT), "secure_fidelity",
                          {"eps_ff": 0.5, "sigma2": 1.0, "frequency_ghz": 5.0})),
        _recipe("figB1", "secure fidelity of truncated-Gaussian codebooks",
                SweepGrid(_span("n_over_sigma2", 0.1, 100, scale="log"), Axis("squeezing_db", (4.0, 8.0, 12.0)),
                          "secure_fidelity", {"codebook": "truncgaussian", "sigma2": 1.0, "gain_db": 40.0,
                                              "eps_ff": 0.5, "frequency_ghz": 5.0})),
    ]
    return {x.id: x for x in r}


RECIPES = _build()


def get_recipe(figure_id: str) -> FigureRecipe:
    try:
        return RECIPES[figure_id]
    except KeyError:
        raise ConfigError(f"unknown figure {figure_id!r}; choose from {sorted(RECIPES)}") from None


def _jsonable(v):
    return v if isinstance(v, (str, int, float, bool)) or v is None else str(v)


def reproduce(recipe: FigureRecipe, out_dir, threads: int | None = 1) -> list[Path]:
    """Write one CSV per grid plus ``<id>.json`` with parameters and runtime."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files, entries = [], []
    for grid in recipe.grids:
        name = f"{recipe.id}.csv" if len(recipe.grids) == 1 else f"{recipe.id}_{grid.quantity}.csv"
        t0 = time.perf_counter()
        rows = run_sweep(grid, threads=threads)
        elapsed = time.perf_counter() - t0
        path = out / name
        path.write_text(format_csv(grid, rows), newline="")
        files.append(path)
        entries.append({
            "file": name,
            "quantity": grid.quantity,
            "axis1": {"name": grid.axis1.name, "scale": grid.axis1.scale, "values": list(grid.axis1.values)},
            "axis2": {"name": grid.axis2.name, "scale": grid.axis2.scale, "values": list(grid.axis2.values)},
            "runtime_s": round(elapsed, 3),
        })
    fixed = {}
    for grid in recipe.grids:
        fixed.update({k: _jsonable(v) for k, v in grid.fixed.items()})
    manifest = {
        "figure": recipe.id,
        "description": recipe.description,
        "parameters": fixed,
        "grids": entries,
        "tool": "cvteleport",
        "version": __version__,
        "python": platform.python_version(),
        "threads": threads,
        "runtime_s": round(sum(e["runtime_s"] for e in entries), 3),
    }
    path = out / f"{recipe.id}.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    files.append(path)
    return files
