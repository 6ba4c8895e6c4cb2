"""Command-line front end.

Every failure prints one line ``error: <category>: <detail>`` to stderr.
Exit codes: 0 success, 2 usage, 3 domain, 4 numerical divergence, 5 I/O.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import fields
from pathlib import Path

from . import io
from .dynamics import (
    DEFAULT_REFINE_TOL,
    DEFAULT_S0,
    DEFAULT_S_END,
    DEFAULT_STEP,
    DEFAULT_WINDOW_FRACTION,
    DimensionlessLZProblem,
    PhysicalLZProblem,
    integrate_dimensionless,
    integrate_physical,
)
from .errors import CrossingLabError, DomainError
from .lz import lz_compare
from .model import PRESET_RANGES, PRESETS, find_crossing, preset, sample_curves
from .sweep import SweepSpec, run_lambda_sweep

EXIT_CODES = {"usage": 2, "domain": 3, "data": 3, "divergence": 4, "io": 5}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"number must be finite, got {text!r}")
    return value


def _float_list(text):
    try:
        return [_float(part) for part in text.split(",") if part.strip()]
    except argparse.ArgumentTypeError:
        raise argparse.ArgumentTypeError(f"invalid number list {text!r}") from None


def _integration_flags(parser, window=False):
    parser.add_argument("--s0", type=_float, default=DEFAULT_S0, help="initial dimensionless time")
    parser.add_argument("--s-end", type=_float, default=DEFAULT_S_END, help="final dimensionless time")
    parser.add_argument("--step", type=_float, default=DEFAULT_STEP, help="base RK4 step in s")
    parser.add_argument("--refine", action="store_true", help="halve the step until p1 settles")
    parser.add_argument("--refine-tol", type=_float, default=DEFAULT_REFINE_TOL,
                        help="largest allowed per-sample change of p1 when refining")
    if window:
        parser.add_argument("--window-fraction", type=_float, default=DEFAULT_WINDOW_FRACTION,
                            help="trailing fraction of samples averaged for the asymptotic p1")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="crossing-lab", formatter_class=fmt,
                     description="Avoided crossings and Landau-Zener transitions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("curves", formatter_class=fmt,
                       help="adiabatic energies and state character on an R grid")
    p.add_argument("--preset", default="toy", choices=sorted(PRESETS))
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="override one preset field (repeatable)")
    p.add_argument("--rmin", type=_float, help="grid start (default: preset range)")
    p.add_argument("--rmax", type=_float, help="grid end (default: preset range)")
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--c12sq", action="store_true", help="append a c12sq = 1 - c11sq column")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("evolve", formatter_class=fmt,
                       help="propagate the diabatic amplitudes through the crossing")
    p.add_argument("--lambda", dest="lam", type=_float, help="adiabaticity parameter")
    p.add_argument("--allow-signed", action="store_true", help="accept negative lambda")
    _integration_flags(p)
    p.add_argument("--stride", type=int, default=1, help="keep every n-th step as a sample")
    phys = p.add_argument_group("physical units (used when --velocity is given)")
    phys.add_argument("--h12", type=_float, default=0.1, help="coupling magnitude")
    phys.add_argument("--h12-phase", type=_float, default=0.0, help="coupling phase in radians")
    phys.add_argument("--slope-diff", type=_float, default=2.0, help="d(H11-H22)/dR at the crossing")
    phys.add_argument("--velocity", type=_float, help="nuclear velocity")
    phys.add_argument("--hbar", type=_float, default=1.0)
    phys.add_argument("--t0", type=_float, default=-100.0)
    phys.add_argument("--tc", type=_float, default=0.0)
    phys.add_argument("--t-end", type=_float, default=500.0)
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("lz", formatter_class=fmt,
                       help="numeric survival probability against exp(-2 pi / lambda)")
    p.add_argument("--lambda", dest="lam", type=_float, required=True)
    _integration_flags(p, window=True)
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="json")

    p = sub.add_parser("sweep", formatter_class=fmt, help="LZ comparison over a list of lambdas")
    p.add_argument("--lambdas", type=_float_list, required=True, help="comma-separated values")
    _integration_flags(p, window=True)
    p.add_argument("--out", default="-", help="comparison table path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--limits", help="write lambda,p1_analytic limit lines here")
    p.add_argument("--trace-dir", help="retain p1(s) traces and write them into this directory")
    p.add_argument("--combined", action="store_true", help="one trace file for all lambdas")
    p.add_argument("--emit-plot-script", action="store_true",
                   help="write plot.gp (gnuplot) next to the traces")
    p.add_argument("--threads", type=int, default=1,
                   help="parallel workers, capped by CROSSING_LAB_THREADS")

    p = sub.add_parser("presets", formatter_class=fmt, help="print the built-in models")
    p.add_argument("--out", default="-")
    return parser


def _check_parent(path):
    if path in (None, "-"):
        return
    parent = Path(path).resolve().parent
    if not parent.is_dir():
        raise io.OutputError(f"directory does not exist: {parent}")


def _ensure_dir(path):
    if path is None:
        return
    _check_parent(path)
    try:
        Path(path).mkdir(exist_ok=True)
    except OSError as exc:
        raise io.OutputError(f"cannot create {path}: {exc.strerror or exc}") from exc


def _overrides(model, pairs):
    known = {f.name: f.type for f in fields(model)}
    out = {}
    for pair in pairs:
        key, sep, text = pair.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in known:
            raise UsageError(f"bad --param {pair!r}; fields are {', '.join(known)}")
        try:
            out[key] = complex(text) if key == "h12" else float(text)
        except ValueError:
            raise UsageError(f"invalid number in --param {pair!r}") from None
    return out


def _model_params(model):
    params = {}
    for f in fields(model):
        value = getattr(model, f.name)
        if isinstance(value, complex):
            params[f.name] = value.real if value.imag == 0 else [value.real, value.imag]
        else:
            params[f.name] = float(value)
    return params


def cmd_curves(args):
    model = preset(args.preset, **_overrides(PRESETS[args.preset], args.param))
    r_lo, r_hi = PRESET_RANGES[args.preset]
    r_lo = r_lo if args.rmin is None else args.rmin
    r_hi = r_hi if args.rmax is None else args.rmax
    if args.points < 2:
        raise DomainError(f"--points must be >= 2, got {args.points}")
    if r_hi <= r_lo:
        raise DomainError(f"--rmax must exceed --rmin, got [{r_lo}, {r_hi}]")
    for R in (r_lo, r_hi):
        if not model.contains(R):
            raise DomainError(f"R={R} is outside the domain of the {model.kind} model")
    _check_parent(args.out)

    span = r_hi - r_lo
    grid = [r_lo + span * i / (args.points - 1) for i in range(args.points)]
    grid[-1] = r_hi
    solutions = sample_curves(model, grid)
    if args.format == "csv":
        io.write_curves_csv(args.out, solutions, include_c12sq=args.c12sq)
        return
    header = io.CURVES_HEADER + (("c12sq",) if args.c12sq else ())
    rows = [dict(zip(header, row)) for row in io.curves_rows(solutions, args.c12sq)]
    try:
        crossing = find_crossing(model, r_lo, r_hi)
    except DomainError:
        crossing = None
    io.write_json(args.out, {"model": model.kind, "params": _model_params(model),
                             "crossing": crossing, "points": rows})


def cmd_evolve(args):
    if args.velocity is not None:
        if args.lam is not None:
            raise UsageError("give either --lambda or --velocity, not both")
        problem = PhysicalLZProblem(
            H12=args.h12 * complex(math.cos(args.h12_phase), math.sin(args.h12_phase)),
            slope_difference=args.slope_diff, velocity=args.velocity, hbar=args.hbar,
            t0=args.t0, t_c=args.tc, t_end=args.t_end, step=args.step, stride=args.stride,
        )
        run = lambda: integrate_physical(problem)  # noqa: E731
    else:
        if args.lam is None:
            raise UsageError("--lambda is required unless --velocity is given")
        if args.lam < 0 and not args.allow_signed:
            raise DomainError("lambda must be > 0")
        problem = DimensionlessLZProblem(args.lam, s0=args.s0, s_end=args.s_end, step=args.step,
                                         stride=args.stride, refine=args.refine,
                                         refine_tol=args.refine_tol)
        run = lambda: integrate_dimensionless(problem)  # noqa: E731
    _check_parent(args.out)

    trajectory = run()
    if args.format == "csv":
        io.write_trajectory_csv(args.out, trajectory)
        return
    rows = [dict(zip(io.TRAJECTORY_HEADER, row)) for row in io.trajectory_rows(trajectory)]
    io.write_json(args.out, {"metadata": io.trajectory_metadata(trajectory), "samples": rows})


def cmd_lz(args):
    if not args.lam > 0:
        raise DomainError("lambda must be > 0")
    DimensionlessLZProblem(args.lam, s0=args.s0, s_end=args.s_end, step=args.step,
                           refine_tol=args.refine_tol)
    if not 0 < args.window_fraction <= 1:
        raise DomainError("window-fraction must lie in (0, 1]")
    _check_parent(args.out)

    record = lz_compare(args.lam, s0=args.s0, s_end=args.s_end, step=args.step,
                        window_fraction=args.window_fraction, refine=args.refine,
                        refine_tol=args.refine_tol)
    if args.format == "json":
        io.write_json(args.out, record.to_dict())
    else:
        io.write_sweep_csv(args.out, [record])


def cmd_sweep(args):
    if not args.lambdas:
        raise DomainError("no lambda values to run")
    if not 0 < args.window_fraction <= 1:
        raise DomainError("window-fraction must lie in (0, 1]")
    if args.threads < 1:
        raise DomainError("--threads must be >= 1")
    _ensure_dir(args.trace_dir)
    _check_parent(args.out)
    _check_parent(args.limits)
    to_stdout = args.out in (None, "-")
    spec = SweepSpec(
        tuple(args.lambdas), s0=args.s0, s_end=args.s_end, step=args.step, refine=args.refine,
        window_fraction=args.window_fraction, retain_traces=args.trace_dir is not None,
        sweep_csv=None if args.format == "json" or to_stdout else args.out,
        json_path=args.out if args.format == "json" and not to_stdout else None,
        trace_dir=args.trace_dir, limits_csv=args.limits,
        plot_script=(Path(args.trace_dir) / "plot.gp"
                     if args.emit_plot_script and args.trace_dir else None),
        combined_traces=args.combined, workers=args.threads,
    )
    records = run_lambda_sweep(spec)
    if to_stdout:
        if args.format == "json":
            io.write_json("-", [r.to_dict() for r in records])
        else:
            io.write_sweep_csv("-", records)
    failed = [r for r in records if r.error]
    for r in failed:
        print(f"warning: lambda={io.fmt(r.lam)}: {r.error}", file=sys.stderr)


def cmd_presets(args):
    listing = {}
    for name, model in PRESETS.items():
        r_lo, r_hi = PRESET_RANGES[name]
        listing[name] = {"model": model.kind, "params": _model_params(model),
                         "rmin": r_lo, "rmax": r_hi}
    _check_parent(args.out)
    io.write_json(args.out, listing)


COMMANDS = {"curves": cmd_curves, "evolve": cmd_evolve, "lz": cmd_lz,
            "sweep": cmd_sweep, "presets": cmd_presets}


def _fail(category, detail):
    detail = " ".join(str(detail).split())
    print(f"error: {category}: {detail}", file=sys.stderr)
    return EXIT_CODES.get(category, 1)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail("usage", exc)
    except CrossingLabError as exc:
        return _fail(exc.category, exc)
    except BrokenPipeError:
        return 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
