"""Batch runs: lambda sweeps and the datasets behind the two figures."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import io
from .dynamics import (
    DEFAULT_S0,
    DEFAULT_S_END,
    DEFAULT_STEP,
    DEFAULT_WINDOW_FRACTION,
    DimensionlessLZProblem,
    integrate_dimensionless,
)
from .errors import CrossingLabError, DomainError
from .lz import LZComparison, compare_trajectory, lz_survival
from .model import sample_curves

__all__ = [
    "SweepSpec",
    "SweepSpecError",
    "run_lambda_sweep",
    "reproduce_curve_figure",
    "reproduce_probability_figure",
    "trace_stride",
    "write_traces",
    "worker_count",
]

# keeps a default-resolution trace around 3 MB
MAX_TRACE_ROWS = 20_000
THREADS_ENV = "CROSSING_LAB_THREADS"


class SweepSpecError(DomainError):
    """A sweep was requested with nothing valid to run."""


@dataclass(frozen=True)
class SweepSpec:
    """A list of ``lam`` values sharing one set of integration settings.

    ``lam = 0`` is accepted only with ``retain_traces``; its comparison uses
    the zero limit of the closed form.  Output paths left as ``None`` are
    not written.
    """

    lambda_values: tuple[float, ...]
    s0: float = DEFAULT_S0
    s_end: float = DEFAULT_S_END
    step: float = DEFAULT_STEP
    refine: bool = False
    window_fraction: float = DEFAULT_WINDOW_FRACTION
    retain_traces: bool = False
    sweep_csv: str | Path | None = None
    json_path: str | Path | None = None
    trace_dir: str | Path | None = None
    limits_csv: str | Path | None = None
    plot_script: str | Path | None = None
    combined_traces: bool = False
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "lambda_values", tuple(float(x) for x in self.lambda_values))
        if not self.lambda_values:
            raise SweepSpecError("no lambda values to run")
        for lam in self.lambda_values:
            if math.isnan(lam) or lam < 0:
                raise SweepSpecError(f"lambda must be > 0, got {lam!r}")
            if lam == 0 and not self.retain_traces:
                raise SweepSpecError("lambda = 0 is allowed only when traces are retained")
        # validates the shared settings up front
        DimensionlessLZProblem(1.0, s0=self.s0, s_end=self.s_end, step=self.step)


def worker_count(requested: int = 1) -> int:
    """``requested`` capped by ``CROSSING_LAB_THREADS`` when that is set."""
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            requested = min(requested, max(1, int(cap)))
        except ValueError:
            raise DomainError(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
    return max(1, requested)


def trace_stride(n_samples: int, max_rows: int = MAX_TRACE_ROWS) -> int:
    """Down-sampling factor that keeps a trace file under ``max_rows`` rows."""
    return max(1, math.ceil(n_samples / max_rows))


def _run_one(lam, spec: SweepSpec):
    try:
        problem = DimensionlessLZProblem(lam, s0=spec.s0, s_end=spec.s_end,
                                         step=spec.step, refine=spec.refine)
        trajectory = integrate_dimensionless(problem)
        record = compare_trajectory(trajectory, spec.s_end, spec.window_fraction)
    except CrossingLabError as exc:
        return LZComparison.failed(lam, spec.s0, spec.s_end, spec.step,
                                   f"{exc.category}: {exc}"), None
    return record, trajectory if spec.retain_traces else None


def _trace_name(index, lam):
    return f"trace_{index:03d}_lambda_{io.fmt(lam)}.csv"


def write_traces(out_dir, traces, combined=False):
    """Write down-sampled survival traces into ``out_dir``.

    Returns ``(lam, file name)`` pairs for the plot script.
    """
    out_dir = Path(out_dir)
    if combined:
        def rows():
            for trajectory in traces:
                for row in io.trajectory_rows(trajectory, trace_stride(len(trajectory))):
                    yield (trajectory.lam, *row)

        first = traces[0]
        io.write_csv(out_dir / "traces.csv", ("lambda",) + io.TRAJECTORY_HEADER, rows(),
                     {"s0": first.s0, "step": first.step,
                      "norm_drift": max(t.norm_drift for t in traces)})
        return [(t.lam, "traces.csv") for t in traces]
    written = []
    for index, trajectory in enumerate(traces):
        name = _trace_name(index, trajectory.lam)
        io.write_trajectory_csv(out_dir / name, trajectory, trace_stride(len(trajectory)))
        written.append((trajectory.lam, name))
    return written


def run_lambda_sweep(spec: SweepSpec, return_traces: bool = False):
    """One :class:`LZComparison` per ``lam``, in input order.

    A failing ``lam`` yields a record with ``error`` set and NaN numbers;
    the rest of the sweep still runs.  Files named in ``spec`` are written
    afterwards.  With ``return_traces`` the retained trajectories are
    returned alongside the records.
    """
    workers = min(worker_count(spec.workers), len(spec.lambda_values))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, spec.lambda_values,
                                    [spec] * len(spec.lambda_values)))
    else:
        results = [_run_one(lam, spec) for lam in spec.lambda_values]

    records = [r for r, _ in results]
    traces = [t for _, t in results]

    if spec.sweep_csv is not None:
        io.write_sweep_csv(spec.sweep_csv, records)
    if spec.json_path is not None:
        io.write_json(spec.json_path, [r.to_dict() for r in records])
    if spec.limits_csv is not None:
        io.write_limits_csv(spec.limits_csv,
                            [(lam, lz_survival(lam)) for lam in spec.lambda_values])
    if spec.retain_traces and spec.trace_dir is not None:
        kept = [t for t in traces if t is not None]
        written = write_traces(spec.trace_dir, kept, spec.combined_traces) if kept else []
        if spec.plot_script is not None and written:
            io.write_plot_script(spec.plot_script, written,
                                 [(lam, lz_survival(lam)) for lam, _ in written],
                                 combined=spec.combined_traces)

    if return_traces:
        return records, traces
    return records


def reproduce_curve_figure(model, R_lo: float, R_hi: float, n_points: int, out=None):
    """Adiabatic curves and ``|c11|**2`` on a uniform grid of ``n_points``.

    When ``out`` is given the curves CSV is written with an extra ``c12sq``
    column (``1 - c11sq``).
    """
    if n_points < 2:
        raise DomainError(f"need at least 2 grid points, got {n_points}")
    if not (math.isfinite(R_lo) and math.isfinite(R_hi)) or R_hi <= R_lo:
        raise DomainError(f"invalid R range [{R_lo}, {R_hi}]")
    span = R_hi - R_lo
    grid = [R_lo + span * i / (n_points - 1) for i in range(n_points)]
    grid[-1] = R_hi
    solutions = sample_curves(model, grid)
    if out is not None:
        io.write_curves_csv(out, solutions, include_c12sq=True)
    return solutions


def reproduce_probability_figure(lambda_values: Sequence[float], s0: float = DEFAULT_S0,
                                 s_end: float = DEFAULT_S_END, out_dir=None,
                                 step: float = DEFAULT_STEP, combined: bool = False,
                                 plot_script: bool = False):
    """Survival traces ``|c1(s)|**2`` for each ``lam`` plus their limit lines.

    Returns ``(traces, limits)`` with ``limits`` a list of
    ``(lam, exp(-2 pi / lam))``.  With ``out_dir`` set, writes one trace
    file per ``lam`` (or a single ``traces.csv`` with a leading ``lambda``
    column when ``combined``), ``limits.csv`` and optionally ``plot.gp``.
    """
    lambda_values = [float(x) for x in lambda_values]
    if not lambda_values:
        raise SweepSpecError("no lambda values to run")
    for lam in lambda_values:
        if math.isnan(lam) or lam < 0:
            raise DomainError(f"lambda must be > 0, got {lam!r}")

    traces = [integrate_dimensionless(DimensionlessLZProblem(lam, s0=s0, s_end=s_end, step=step))
              for lam in lambda_values]
    limits = [(lam, lz_survival(lam)) for lam in lambda_values]

    if out_dir is not None:
        written = write_traces(out_dir, traces, combined)
        io.write_limits_csv(Path(out_dir) / "limits.csv", limits)
        if plot_script:
            io.write_plot_script(Path(out_dir) / "plot.gp", written, limits, combined=combined)
    return traces, limits
