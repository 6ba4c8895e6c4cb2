"""Byte-stable CSV and JSON writers.

Floats are written with 17 significant digits so every value round-trips
exactly; lines end in LF and files are UTF-8.
"""

from __future__ import annotations

import contextlib
import json
import math
import os
import sys
from typing import Iterable, Sequence

from .errors import CrossingLabError

CURVES_HEADER = ("R", "H11", "H22", "ReH12", "ImH12", "E1", "E2", "gap", "c11sq")
TRAJECTORY_HEADER = ("s", "re_c1", "im_c1", "re_c2", "im_c2", "p1", "p2")
SWEEP_HEADER = ("lambda", "p1_numeric", "p1_analytic", "abs_error", "rel_error")
LIMITS_HEADER = ("lambda", "p1_analytic")


class OutputError(CrossingLabError, OSError):
    category = "io"


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = format(value, ".17g")
    return "0" if text == "-0" else text


@contextlib.contextmanager
def _opened(path):
    if path is None or path == "-":
        yield sys.stdout
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            yield handle
    except OSError as exc:
        raise OutputError(f"cannot write {os.fspath(path)}: {exc.strerror or exc}") from exc


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence], comments: dict | None = None):
    """Write ``rows`` under ``header``; ``comments`` become trailing ``# key=value`` lines."""
    with _opened(path) as out:
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join(fmt(v) for v in row) + "\n")
        for key, value in (comments or {}).items():
            out.write(f"# {key}={value if isinstance(value, str) else fmt(value)}\n")


def curves_rows(solutions, include_c12sq=False):
    for sol in solutions:
        row = [sol.R, sol.H11, sol.H22, sol.H12.real, sol.H12.imag,
               sol.E1, sol.E2, sol.gap, sol.c11sq]
        if include_c12sq:
            row.append(1.0 - sol.c11sq)
        yield row


def write_curves_csv(path, solutions, include_c12sq=False):
    header = CURVES_HEADER + (("c12sq",) if include_c12sq else ())
    write_csv(path, header, curves_rows(solutions, include_c12sq))


def trajectory_rows(trajectory, every=1):
    s, c1, c2 = trajectory.s, trajectory.c1, trajectory.c2
    last = len(s) - 1
    for i in range(len(s)):
        if i % every and i != last:
            continue
        a, b = c1[i], c2[i]
        yield (s[i], a.real, a.imag, b.real, b.imag,
               a.real * a.real + a.imag * a.imag, b.real * b.real + b.imag * b.imag)


def trajectory_metadata(trajectory, every=1) -> dict:
    meta = {
        "lambda": trajectory.lam,
        "s0": trajectory.s0,
        "step": trajectory.step,
        "norm_drift": trajectory.norm_drift,
        "stride": trajectory.stride * every,
    }
    for key, value in trajectory.metadata.items():
        meta.setdefault(key, value)
    return meta


def write_trajectory_csv(path, trajectory, every=1):
    """``every`` keeps one sample in ``every`` (the last is always kept)."""
    write_csv(path, TRAJECTORY_HEADER, trajectory_rows(trajectory, every),
              trajectory_metadata(trajectory, every))


def write_sweep_csv(path, comparisons):
    rows = ((c.lam, c.p1_numeric, c.p1_analytic, c.abs_error, c.rel_error) for c in comparisons)
    write_csv(path, SWEEP_HEADER, rows)


def write_limits_csv(path, pairs):
    write_csv(path, LIMITS_HEADER, pairs)


def dumps_json(obj, indent=2, _level=0) -> str:
    """Deterministic JSON text; non-finite floats become ``null``."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, int)):
        return fmt(obj)
    if isinstance(obj, float):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps_json(str(k))}: {dumps_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_json(path, obj):
    with _opened(path) as out:
        out.write(dumps_json(obj) + "\n")


def write_plot_script(path, traces: Sequence[tuple[float, str]], limits: Sequence[tuple[float, float]],
                      combined: bool = False):
    """gnuplot commands overlaying each trace with its limit line.

    With ``combined`` every trace lives in one file whose first column is
    ``lambda``.
    """
    lines = [
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set xlabel 's'",
        "set ylabel '|c1|^2'",
        "set yrange [0:1]",
    ]
    parts = []
    for lam, trace in traces:
        if combined:
            using = f"2:(($1=={fmt(lam)})?$7:NaN)"
        else:
            using = "1:6"
        parts.append(f"'{trace}' every ::1 using {using} with lines title 'lambda={fmt(lam)}'")
    for lam, limit in limits:
        parts.append(f"{fmt(limit)} with lines dashtype 2 lc rgb 'green' title 'LZ limit {fmt(lam)}'")
    lines.append("plot " + ", \\\n     ".join(parts))
    with _opened(path) as out:
        out.write("\n".join(lines) + "\n")
