"""Command-line interface: ``cvteleport <verb> [options]``.

Exit codes: 0 on success, 2 for usage or configuration errors, 3 when the
physics is inconsistent (unphysical state) or a numerical search fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .codebook import parse_codebook
from .config import config_from_mapping, parse_assignments, read_config_file
from .errors import ConfigError, ConvergenceError, PhysicsError
from .nocloning import A_MAX, threshold
from .recipes import RECIPES, get_recipe, reproduce
from .security import finite_parameter_point, secure_fidelity
from .sweep import QUANTITIES, Axis, SweepGrid, format_csv, run_sweep, security_arguments

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _parameters(args) -> dict[str, str]:
    values: dict[str, str] = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    values.update(parse_assignments(getattr(args, "set", None) or []))
    return values


def _grid(text: str | None) -> tuple[int, int] | None:
    if text is None:
        return None
    a, sep, b = text.lower().partition("x")
    try:
        counts = int(a), int(b)
    except ValueError:
        counts = None
    if not sep or counts is None or min(counts) < 2:
        raise ConfigError(f"--grid expects AxB with A, B >= 2, got {text!r}")
    return counts


def _emit(report: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report, indent=2, default=str))
        return
    width = max(len(k) for k in report)
    for k, v in report.items():
        text = f"{v:.9g}" if isinstance(v, float) else str(v)
        print(f"{k:<{width}}  {text}")


def cmd_fidelity(args) -> int:
    from .teleport import run_chain

    cfg = config_from_mapping(_parameters(args))
    res = run_chain(cfg)
    product = cfg.gain * cfg.coupling * (1 - cfg.eps_ff)
    _emit({
        "fidelity": res.fidelity,
        "v_out": res.v_out,
        "k": res.displacement_gain,
        "gain": cfg.gain,
        "coupling": cfg.coupling,
        "matched": bool(math.isclose(product, 4.0, rel_tol=1e-9)),
    }, args.json)
    return EXIT_OK


def cmd_sweep(args) -> int:
    fixed = _parameters(args)
    preset = fixed.pop("preset", None)
    axis1, axis2 = Axis.parse(args.axis1), Axis.parse(args.axis2)
    counts = _grid(args.grid)
    if counts:
        axis1, axis2 = axis1.with_count(counts[0]), axis2.with_count(counts[1])
    grid = SweepGrid(axis1, axis2, args.quantity, fixed, preset)
    text = format_csv(grid, run_sweep(grid, threads=args.threads))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "sweep.csv").write_text(text, newline="")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_nocloning(args) -> int:
    cb = parse_codebook(args.codebook)
    res = threshold(cb, a_max=args.a_max, method=args.method)
    _emit({"codebook": cb.spec, "f_nc": res.f_nc, "a_opt": res.a_opt}, args.json)
    return EXIT_OK


def cmd_security(args) -> int:
    cb = parse_codebook(args.codebook)
    values = _parameters(args)
    r, G, eps_ff, T_ff, freq = security_arguments(values)
    if args.infinite_gain:
        G = math.inf
    report: dict[str, object] = {"codebook": cb.spec, "squeeze_r": r, "gain": G, "eps_ff": eps_ff}
    if not math.isinf(G):
        p = finite_parameter_point(r, G, eps_ff, T_ff, freq, cb, pipeline=args.pipeline)
        report.update(temp_ff=T_ff, mutual_information=p.mutual_information, holevo=p.holevo,
                      fidelity=p.fidelity, secure=p.secure)
    fs = secure_fidelity(r, G, eps_ff, freq, cb, pipeline=args.pipeline)
    report.update(secure_fidelity=fs.fidelity, status=fs.status)
    if fs.temperature is not None:
        report["crossing_temp"] = fs.temperature
    _emit(report, args.json)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    recipe = get_recipe(args.figure)
    counts = _grid(args.grid)
    if counts:
        recipe = recipe.resized(*counts)
    files = reproduce(recipe, args.out, threads=args.threads)
    if args.json:
        print(json.dumps([str(f) for f in files]))
    else:
        for f in files:
            print(f)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cvteleport", description="Analog CV teleportation modelling toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress and warnings")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def common(p, config=True):
        if config:
            p.add_argument("--config", metavar="PATH", help="flat key=value configuration file")
            p.add_argument("--set", action="append", metavar="KEY=VALUE", default=[],
                           help="override one configuration key (repeatable)")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("fidelity", help="teleportation fidelity of one configuration")
    common(p)
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("sweep", help="two-axis parameter sweep to CSV")
    p.add_argument("axis1", help="name=lo:hi:count[:lin|log|db] or name=v1,v2,...")
    p.add_argument("axis2", help="second axis, same syntax")
    p.add_argument("--quantity", choices=QUANTITIES, default="fidelity")
    p.add_argument("--out", metavar="DIR", help="write DIR/sweep.csv instead of stdout")
    p.add_argument("--threads", type=int, default=1, metavar="N")
    p.add_argument("--grid", metavar="AxB", help="resample ranged axes to A and B points")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("nocloning", help="no-cloning threshold of a codebook")
    p.add_argument("codebook", help='e.g. "gaussian:sigma2=1" or "truncgaussian:sigma2=1,N=10"')
    p.add_argument("--a-max", type=float, default=A_MAX, help="largest cloner amplification")
    p.add_argument("--method", choices=("laplace", "quadrature"), default="laplace")
    common(p, config=False)
    p.set_defaults(func=cmd_nocloning)

    p = sub.add_parser("security", help="information balance and secure fidelity")
    p.add_argument("--codebook", default="gaussian:sigma2=1")
    p.add_argument("--pipeline", choices=("differential", "von_neumann"), default="differential")
    p.add_argument("--infinite-gain", action="store_true", help="projective-measurement limit")
    common(p)
    p.set_defaults(func=cmd_security)

    p = sub.add_parser("reproduce", help="regenerate the data of a figure")
    p.add_argument("figure", help=", ".join(sorted(RECIPES)))
    p.add_argument("--out", metavar="DIR", default=".")
    p.add_argument("--threads", type=int, default=None, metavar="N", help="default: all cores")
    p.add_argument("--grid", metavar="AxB", help="override the default resolution")
    p.add_argument("--json", action="store_true", help="print written paths as JSON")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PhysicsError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    sys.exit(main())
