"""Diabatic two-level models and their closed-form adiabatic solution.

A model supplies the diabatic matrix elements ``H11(R)``, ``H22(R)`` and
``H12(R)`` as functions of the internuclear distance ``R``; ``H21`` is the
complex conjugate of ``H12``.  Diagonalising the 2x2 matrix at each ``R``
gives the adiabatic energies ``E1 <= E2`` and the coefficients of the
adiabatic states in the diabatic basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from .errors import BracketError, DomainError

__all__ = [
    "LinearCrossing",
    "IonicCovalent",
    "CustomModel",
    "AdiabaticSolution",
    "PRESETS",
    "preset",
    "evaluate_diabatic",
    "adiabatic_solve",
    "find_crossing",
    "slope_difference",
    "sample_curves",
]


@dataclass(frozen=True)
class LinearCrossing:
    """Straight diabatic lines ``H11 = e1_0 + slope1*R``, ``H22 = e2_0 + slope2*R``
    with a constant coupling."""

    e1_0: float
    slope1: float
    e2_0: float
    slope2: float
    h12: complex

    kind = "linear"

    def contains(self, R: float) -> bool:
        return math.isfinite(R)

    def elements(self, R):
        return self.e1_0 + self.slope1 * R, self.e2_0 + self.slope2 * R, complex(self.h12)

    def slope_difference(self, R):
        return self.slope1 - self.slope2


@dataclass(frozen=True)
class IonicCovalent:
    """Schematic ionic/covalent pair.

    The covalent curve is flat at ``covalent_level``; the ionic curve is
    ``ionic_asymptote - coulomb_coefficient / R``.  Defined for ``R > 0``.
    """

    covalent_level: float = 0.0
    ionic_asymptote: float = 1.0
    coulomb_coefficient: float = 5.0
    h12: complex = 0.05

    kind = "ionic-covalent"

    def contains(self, R: float) -> bool:
        return math.isfinite(R) and R > 0

    def elements(self, R):
        ionic = self.ionic_asymptote - self.coulomb_coefficient / R
        return float(self.covalent_level), ionic, complex(self.h12)

    def slope_difference(self, R):
        # d/dR [E_cov - (D - C/R)] = -C/R**2
        return -self.coulomb_coefficient / (R * R)


@dataclass(frozen=True)
class CustomModel:
    """Arbitrary callables for the three matrix elements on ``[r_min, r_max]``."""

    h11: Callable[[float], float]
    h22: Callable[[float], float]
    h12: Callable[[float], complex]
    r_min: float = -math.inf
    r_max: float = math.inf

    kind = "custom"

    def contains(self, R: float) -> bool:
        return self.r_min <= R <= self.r_max and math.isfinite(R)

    def elements(self, R):
        return float(self.h11(R)), float(self.h22(R)), complex(self.h12(R))

    def slope_difference(self, R):
        step = 1e-6 * max(1.0, abs(R))
        # shrink so both stencil points stay inside the domain
        room = min(R - self.r_min, self.r_max - R)
        if room < step:
            step = 0.5 * room
        if not step > 0:
            raise DomainError(f"R={R!r} is on the edge of the model domain")

        def gap(x):
            h11, h22, _ = evaluate_diabatic(self, x)
            return h11 - h22

        return (gap(R + step) - gap(R - step)) / (2 * step)


PRESETS = {
    "toy": LinearCrossing(e1_0=1.0, slope1=1.0, e2_0=2.0, slope2=-1.0, h12=0.1),
    "ionic-covalent": IonicCovalent(),
}

# suggested R windows for the presets (used by the CLI and the presets listing)
PRESET_RANGES = {"toy": (0.0, 1.0), "ionic-covalent": (1.0, 20.0)}


def preset(name: str, **overrides):
    """Return a built-in model, optionally with some fields replaced."""
    try:
        base = PRESETS[name]
    except KeyError:
        raise DomainError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return replace(base, **overrides) if overrides else base


def evaluate_diabatic(model, R: float) -> tuple[float, float, complex]:
    """Diabatic matrix elements ``(H11, H22, H12)`` of ``model`` at ``R``."""
    if not model.contains(R):
        raise DomainError(f"R={R!r} is outside the domain of the {model.kind} model")
    h11, h22, h12 = model.elements(R)
    if not (math.isfinite(h11) and math.isfinite(h22) and math.isfinite(abs(h12))):
        raise DomainError(f"non-finite matrix element at R={R!r}")
    return h11, h22, h12


@dataclass(frozen=True)
class AdiabaticSolution:
    """Eigen-decomposition of the 2x2 electronic matrix at one geometry.

    ``c11, c21`` are the diabatic components of the lower state and
    ``c12, c22`` those of the upper state.  Each ``c1j`` is real and
    non-negative.
    """

    H11: float
    H22: float
    H12: complex
    E1: float
    E2: float
    gap: float
    c11: complex
    c21: complex
    c12: complex
    c22: complex
    R: float | None = None

    @property
    def c11sq(self) -> float:
        return abs(self.c11) ** 2

    @property
    def c12sq(self) -> float:
        return abs(self.c12) ** 2


def _unit_column(top: complex, bottom: complex) -> tuple[complex, complex]:
    # rescale first so subnormal entries keep their digits
    scale = max(abs(top.real), abs(top.imag), abs(bottom.real), abs(bottom.imag))
    top, bottom = top / scale, bottom / scale
    norm = math.hypot(abs(top), abs(bottom))
    top, bottom = top / norm, bottom / norm
    if top != 0:
        phase = top.conjugate() / abs(top)
        return complex(abs(top)), bottom * phase
    return 0j, complex(abs(bottom))


def adiabatic_solve(H11: float, H22: float, H12: complex, R: float | None = None) -> AdiabaticSolution:
    """Closed-form eigenvalues and eigenvectors of ``[[H11, H12], [H12*, H22]]``.

    Parameters
    ----------
    H11, H22 : float
        Diabatic energies.
    H12 : complex
        Coupling; ``H21`` is taken as its conjugate.
    R : float, optional
        Geometry label carried into the result.

    Returns
    -------
    AdiabaticSolution
        With ``E1 = (H11+H22)/2 - gap/2`` and ``E2 = (H11+H22)/2 + gap/2``,
        ``gap = sqrt((H11-H22)**2 + 4|H12|**2)``.
    """
    H11 = float(H11)
    H22 = float(H22)
    H12 = complex(H12)
    if not (math.isfinite(H11) and math.isfinite(H22) and math.isfinite(abs(H12))):
        raise DomainError("matrix elements must be finite")

    half_split = 0.5 * (H11 - H22)
    coupling = abs(H12)
    half_gap = math.hypot(half_split, coupling)
    mean = 0.5 * (H11 + H22)
    E1, E2 = mean - half_gap, mean + half_gap

    if coupling == 0.0:
        # limits of the coupled columns as a real positive H12 goes to zero
        if H11 <= H22:
            cols = ((1 + 0j, 0j), (0j, 1 + 0j))
        else:
            cols = ((0j, -1 + 0j), (1 + 0j, 0j))
        return AdiabaticSolution(H11, H22, H12, E1, E2, 2 * half_gap, *cols[0], *cols[1], R=R)

    # eigenvectors do not depend on scale; work with O(1) entries so that
    # tiny or subnormal couplings keep their phase
    scale = max(abs(H11), abs(H22), abs(H12.real), abs(H12.imag))
    h12 = H12 / scale
    split = 0.5 * (H11 / scale - H22 / scale)
    mag = abs(h12)
    # E - H11 and E - H22 for both roots, written so that nothing cancels
    big = math.hypot(split, mag) + abs(split)
    small = mag * (mag / big)
    if split >= 0:
        e1_h11, e1_h22, e2_h11, e2_h22 = -big, -small, small, big
    else:
        e1_h11, e1_h22, e2_h11, e2_h22 = -small, -big, big, small

    columns = []
    for e_h11, e_h22 in ((e1_h11, e1_h22), (e2_h11, e2_h22)):
        # two null vectors of (H - E); keep the better conditioned one
        first = (h12, complex(e_h11))
        second = (complex(e_h22), h12.conjugate())
        if math.hypot(mag, e_h11) >= math.hypot(e_h22, mag):
            columns.append(_unit_column(*first))
        else:
            columns.append(_unit_column(*second))

    (c11, c21), (c12, c22) = columns
    return AdiabaticSolution(H11, H22, H12, E1, E2, 2 * half_gap, c11, c21, c12, c22, R=R)


def find_crossing(model, R_lo: float, R_hi: float, max_iter: int = 200) -> float:
    """Locate ``R_c`` with ``H11(R_c) = H22(R_c)`` by bisection on ``[R_lo, R_hi]``.

    If the bracket holds several roots, the one bisection converges to is
    returned.
    """
    def split(R):
        h11, h22, _ = evaluate_diabatic(model, R)
        return h11 - h22, 1e-12 * max(1.0, abs(h11) + abs(h22))

    lo, hi = (R_lo, R_hi) if R_lo <= R_hi else (R_hi, R_lo)
    f_lo, tol = split(lo)
    if abs(f_lo) <= tol:
        return lo
    f_hi, tol = split(hi)
    if abs(f_hi) <= tol:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise BracketError(f"H11 - H22 does not change sign on [{R_lo}, {R_hi}]")

    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid, tol = split(mid)
        if abs(f_mid) <= tol or mid in (lo, hi):
            break
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return mid


def slope_difference(model, R_c: float) -> float:
    """``d(H11 - H22)/dR`` at ``R_c``; central difference for custom models."""
    if not model.contains(R_c):
        raise DomainError(f"R={R_c!r} is outside the domain of the {model.kind} model")
    return float(model.slope_difference(R_c))


def sample_curves(model, R_grid: Sequence[float]) -> list[AdiabaticSolution]:
    """Adiabatic solution at every grid point, in grid order."""
    return [adiabatic_solve(*evaluate_diabatic(model, R), R=R) for R in R_grid]
