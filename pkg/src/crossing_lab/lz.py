"""Closed-form Landau-Zener limit and numeric-vs-analytic comparisons."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import (
    DEFAULT_S0,
    DEFAULT_S_END,
    DEFAULT_STEP,
    DEFAULT_WINDOW_FRACTION,
    DimensionlessLZProblem,
    Trajectory,
    integrate_dimensionless,
    survival_probability,
)
from .errors import DomainError

__all__ = ["LZComparison", "lz_survival", "lz_compare", "compare_trajectory"]


def lz_survival(lam: float) -> float:
    """Asymptotic probability ``exp(-2 pi / lam)`` of staying in the initial
    diabatic state.

    ``lam = 0`` returns 0 (complete transfer), the limit of the formula.
    Negative values raise :class:`DomainError`.
    """
    if math.isnan(lam) or lam < 0:
        raise DomainError(f"lambda must be > 0, got {lam!r}")
    if lam == 0:
        return 0.0
    return math.exp(-2 * math.pi / lam)


@dataclass(frozen=True)
class LZComparison:
    lam: float
    p1_numeric: float
    p1_analytic: float
    abs_error: float
    rel_error: float
    s0: float
    s_end: float
    step: float
    error: str | None = None

    def to_dict(self) -> dict:
        record = {
            "lambda": self.lam,
            "p1_numeric": self.p1_numeric,
            "p1_analytic": self.p1_analytic,
            "abs_error": self.abs_error,
            "rel_error": self.rel_error,
            "s0": self.s0,
            "s_end": self.s_end,
            "step": self.step,
        }
        if self.error is not None:
            record["error"] = self.error
        return record

    @classmethod
    def failed(cls, lam, s0, s_end, step, message):
        nan = math.nan
        return cls(lam, nan, nan, nan, nan, s0, s_end, step, error=message)


def compare_trajectory(trajectory: Trajectory, s_end: float,
                       window_fraction: float = DEFAULT_WINDOW_FRACTION) -> LZComparison:
    """Pair the tail-averaged survival of ``trajectory`` with the closed form."""
    lam = trajectory.lam
    numeric = survival_probability(trajectory, window_fraction)
    analytic = lz_survival(abs(lam))
    abs_error = abs(numeric - analytic)
    rel_error = abs_error / analytic if analytic > 0 else math.nan
    return LZComparison(lam, numeric, analytic, abs_error, rel_error,
                        trajectory.s0, s_end, trajectory.step)


def lz_compare(lam: float, s0: float = DEFAULT_S0, s_end: float = DEFAULT_S_END,
               step: float = DEFAULT_STEP, window_fraction: float = DEFAULT_WINDOW_FRACTION,
               refine: bool = False, **settings) -> LZComparison:
    """Integrate at ``lam`` from ``s0`` and compare the tail average of
    ``|c1|**2`` with ``exp(-2 pi / lam)``.

    Extra keyword arguments are forwarded to :class:`DimensionlessLZProblem`.
    """
    if not lam > 0:
        raise DomainError(f"lambda must be > 0, got {lam!r}")
    problem = DimensionlessLZProblem(lam, s0=s0, s_end=s_end, step=step, refine=refine, **settings)
    return compare_trajectory(integrate_dimensionless(problem), s_end, window_fraction)
