"""Time propagation of the two diabatic amplitudes through a linear crossing.

With a constant coupling ``H12``, a diabatic splitting that grows linearly in
time, ``H11 - H22 = alpha (t - t_c)``, and the dimensionless time
``s = |H12| (t - t_c) / hbar``, the survival amplitude obeys

    c1'' = i lam s c1' - c1,    c1(s0) = 1,  c1'(s0) = 0,

with the single parameter ``lam = hbar alpha / |H12|**2``.

Writing that equation as a first-order system in ``(c1, c1')`` leaves the
fast phase ``exp(i lam s**2 / 2)`` of ``c1'`` inside the state, and a fixed
step RK4 loses norm on it at large ``lam |s|``.  The integrators here carry
``c2 = i exp(-i lam s**2 / 2) c1'`` instead, so that

    c1' = -i exp(+i lam s**2 / 2) c2,   c2' = -i exp(-i lam s**2 / 2) c1,

and the oscillation sits in the known coefficients.  ``|c1|**2 + |c2|**2``
equals ``|c1|**2 + |c1'|**2``, the quantity conserved by the second-order
equation.  On top of that each base step is split into equal sub-steps once
the local frequency ``|lam s|`` passes ``phase_rate_limit``; the split depends
only on ``s``, so halving the base step halves every sub-step and the scheme
stays fourth order.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .errors import DivergenceError, DomainError, InsufficientDataError, SingularReductionError

__all__ = [
    "DEFAULT_STEP",
    "DEFAULT_S0",
    "DEFAULT_S_END",
    "DEFAULT_WINDOW_FRACTION",
    "DimensionlessLZProblem",
    "PhysicalLZProblem",
    "Trajectory",
    "reduce_to_dimensionless",
    "integrate_dimensionless",
    "integrate_physical",
    "survival_probability",
]

DEFAULT_STEP = 5e-4
DEFAULT_S0 = -10.0
DEFAULT_S_END = 50.0
DEFAULT_WINDOW_FRACTION = 0.2
DEFAULT_PHASE_RATE_LIMIT = 200.0
DEFAULT_REFINE_TOL = 1e-6
MAX_REFINEMENTS = 8


def _check_finite(**values):
    for name, value in values.items():
        if not math.isfinite(value):
            raise DomainError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class DimensionlessLZProblem:
    """Settings for the one-parameter equation in dimensionless time ``s``.

    ``lam`` may be negative (opposite slope ordering); only ``|lam|``
    affects probabilities.  ``stride`` keeps every ``stride``-th base step
    as a trajectory sample.  With ``refine`` on, the base step is halved
    until no sample's ``p1`` moves by more than ``refine_tol``.
    """

    lam: float
    s0: float = DEFAULT_S0
    s_end: float = DEFAULT_S_END
    step: float = DEFAULT_STEP
    stride: int = 1
    refine: bool = False
    refine_tol: float = DEFAULT_REFINE_TOL
    phase_rate_limit: float = DEFAULT_PHASE_RATE_LIMIT

    def __post_init__(self):
        _check_finite(lam=self.lam, s0=self.s0, s_end=self.s_end, step=self.step)
        if self.s_end < self.s0:
            raise DomainError(f"s_end={self.s_end} precedes s0={self.s0}")
        if not self.step > 0:
            raise DomainError("step must be > 0")
        if self.stride < 1:
            raise DomainError("stride must be >= 1")
        if not self.refine_tol > 0:
            raise DomainError("refine_tol must be > 0")
        if not self.phase_rate_limit > 0:
            raise DomainError("phase_rate_limit must be > 0")

    @property
    def n_steps(self) -> int:
        return math.ceil((self.s_end - self.s0) / self.step - 1e-9)


@dataclass(frozen=True)
class PhysicalLZProblem:
    """A constant-velocity passage through a linear crossing in physical units.

    ``step`` is the base step expressed in dimensionless time so that the
    physical and dimensionless integrators use the same grid.
    """

    H12: complex
    slope_difference: float
    velocity: float
    hbar: float = 1.0
    t0: float = -10.0
    t_c: float = 0.0
    t_end: float = 50.0
    step: float = DEFAULT_STEP
    stride: int = 1
    phase_rate_limit: float = DEFAULT_PHASE_RATE_LIMIT

    def __post_init__(self):
        _check_finite(
            H12=abs(self.H12), slope_difference=self.slope_difference,
            velocity=self.velocity, hbar=self.hbar,
            t0=self.t0, t_c=self.t_c, t_end=self.t_end,
        )
        if not self.velocity > 0:
            raise DomainError("velocity must be > 0")
        if not self.hbar > 0:
            raise DomainError("hbar must be > 0")
        if self.t_end < self.t0:
            raise DomainError(f"t_end={self.t_end} precedes t0={self.t0}")
        if not self.step > 0:
            raise DomainError("step must be > 0")
        if self.stride < 1:
            raise DomainError("stride must be >= 1")

    @property
    def alpha(self) -> float:
        """Rate of change of ``H11 - H22`` in time."""
        return self.slope_difference * self.velocity


@dataclass
class Trajectory:
    """Sampled amplitudes ``c1(s)``, ``c2(s)`` on a uniform grid in ``s``."""

    s: list[float]
    c1: list[complex]
    c2: list[complex]
    lam: float
    s0: float
    step: float
    stride: int = 1
    norm_drift: float = 0.0
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.s)

    @property
    def samples(self):
        return list(zip(self.s, self.c1, self.c2))

    @property
    def p1(self) -> list[float]:
        return [abs(c) ** 2 for c in self.c1]

    @property
    def p2(self) -> list[float]:
        return [abs(c) ** 2 for c in self.c2]


def _substeps(lam_abs, s_a, s_b, limit):
    rate = lam_abs * max(abs(s_a), abs(s_b))
    return max(1, math.ceil(rate / limit)) if rate > limit else 1


def _propagate_dimensionless(lam, s0, s_end, n, stride, limit):
    h = (s_end - s0) / n if n else 0.0
    half_lam = 0.5 * lam
    lam_abs = abs(lam)

    def rhs(s, a, b):
        e = cmath.exp(1j * half_lam * s * s)
        return -1j * e * b, -1j * e.conjugate() * a

    a, b = 1 + 0j, 0j
    s_out, a_out, b_out = [s0], [a], [b]
    drift = 0.0
    for k in range(n):
        s_a = s0 + k * h
        s_b = s0 + (k + 1) * h if k + 1 < n else s_end
        m = _substeps(lam_abs, s_a, s_b, limit)
        dh = (s_b - s_a) / m
        for j in range(m):
            s = s_a + j * dh
            k1a, k1b = rhs(s, a, b)
            k2a, k2b = rhs(s + 0.5 * dh, a + 0.5 * dh * k1a, b + 0.5 * dh * k1b)
            k3a, k3b = rhs(s + 0.5 * dh, a + 0.5 * dh * k2a, b + 0.5 * dh * k2b)
            k4a, k4b = rhs(s + dh, a + dh * k3a, b + dh * k3b)
            a += dh / 6 * (k1a + 2 * k2a + 2 * k3a + k4a)
            b += dh / 6 * (k1b + 2 * k2b + 2 * k3b + k4b)
        norm = a.real * a.real + a.imag * a.imag + b.real * b.real + b.imag * b.imag
        if not math.isfinite(norm):
            raise DivergenceError(s_b)
        drift = max(drift, abs(norm - 1.0))
        if (k + 1) % stride == 0 or k + 1 == n:
            s_out.append(s_b)
            a_out.append(a)
            b_out.append(b)
    return s_out, a_out, b_out, drift, h


def integrate_dimensionless(p: DimensionlessLZProblem) -> Trajectory:
    """Propagate ``c1(s0) = 1, c2(s0) = 0`` from ``p.s0`` to ``p.s_end``.

    ``c2`` follows the convention ``c2 = i exp(-i lam s**2/2) c1'``, so
    ``|c2| = |c1'|``.  The final sample always sits at ``s_end`` even when it
    falls off the stride.
    """
    n, stride = p.n_steps, p.stride
    if n == 0:
        return Trajectory([p.s0], [1 + 0j], [0j], p.lam, p.s0, 0.0, stride, 0.0,
                          {"refinements": 0})

    run = _propagate_dimensionless(p.lam, p.s0, p.s_end, n, stride, p.phase_rate_limit)
    refinements = 0
    change = None
    if p.refine:
        while refinements < MAX_REFINEMENTS:
            n, stride = 2 * n, 2 * stride
            finer = _propagate_dimensionless(p.lam, p.s0, p.s_end, n, stride, p.phase_rate_limit)
            refinements += 1
            change = max(abs(abs(x) ** 2 - abs(y) ** 2) for x, y in zip(run[1], finer[1]))
            run = finer
            if change < p.refine_tol:
                break

    s, c1, c2, drift, h = run
    meta = {"refinements": refinements}
    if change is not None:
        meta["refine_change"] = change
    return Trajectory(s, c1, c2, p.lam, p.s0, h, stride, drift, meta)


def reduce_to_dimensionless(p: PhysicalLZProblem) -> DimensionlessLZProblem:
    """Map a physical passage to ``lam = hbar * dH * v / |H12|**2`` and the
    window ``s = |H12| (t - t_c) / hbar``."""
    coupling = abs(p.H12)
    if coupling == 0:
        raise SingularReductionError("H12 = 0 has no dimensionless form")
    rate = coupling / p.hbar
    return DimensionlessLZProblem(
        lam=p.hbar * p.alpha / coupling**2,
        s0=rate * (p.t0 - p.t_c),
        s_end=rate * (p.t_end - p.t_c),
        step=p.step,
        stride=p.stride,
        phase_rate_limit=p.phase_rate_limit,
    )


def integrate_physical(p: PhysicalLZProblem) -> Trajectory:
    """Propagate ``dc1/dt = -i w c2``, ``dc2/dt = -i w* c1`` in physical time.

    ``w = H12 exp(i phi(t)) / hbar`` with the accumulated phase
    ``phi = alpha (t - t_c)**2 / (2 hbar)`` evaluated in closed form.  The
    time grid is the image of the dimensionless grid, and samples are
    reported against ``s``.
    """
    reduced = reduce_to_dimensionless(p)
    coupling = abs(p.H12)
    rate = coupling / p.hbar
    lam_abs = abs(reduced.lam)
    H12 = complex(p.H12)
    hbar, t_c = p.hbar, p.t_c
    phase_coeff = p.alpha / (2 * hbar)
    limit = p.phase_rate_limit

    def rhs(t, a, b):
        dt = t - t_c
        w = H12 * cmath.exp(1j * phase_coeff * dt * dt) / hbar
        return -1j * w * b, -1j * w.conjugate() * a

    n, stride = reduced.n_steps, p.stride
    a, b = 1 + 0j, 0j
    s_out, a_out, b_out = [reduced.s0], [a], [b]
    drift = 0.0
    h_t = (p.t_end - p.t0) / n if n else 0.0
    for k in range(n):
        t_a = p.t0 + k * h_t
        t_b = p.t0 + (k + 1) * h_t if k + 1 < n else p.t_end
        m = _substeps(lam_abs, rate * (t_a - t_c), rate * (t_b - t_c), limit)
        dt = (t_b - t_a) / m
        for j in range(m):
            t = t_a + j * dt
            k1a, k1b = rhs(t, a, b)
            k2a, k2b = rhs(t + 0.5 * dt, a + 0.5 * dt * k1a, b + 0.5 * dt * k1b)
            k3a, k3b = rhs(t + 0.5 * dt, a + 0.5 * dt * k2a, b + 0.5 * dt * k2b)
            k4a, k4b = rhs(t + dt, a + dt * k3a, b + dt * k3b)
            a += dt / 6 * (k1a + 2 * k2a + 2 * k3a + k4a)
            b += dt / 6 * (k1b + 2 * k2b + 2 * k3b + k4b)
        norm = abs(a) ** 2 + abs(b) ** 2
        if not math.isfinite(norm):
            raise DivergenceError(rate * (t_b - t_c))
        drift = max(drift, abs(norm - 1.0))
        if (k + 1) % stride == 0 or k + 1 == n:
            s_out.append(rate * (t_b - t_c))
            a_out.append(a)
            b_out.append(b)

    return Trajectory(
        s_out, a_out, b_out, reduced.lam, reduced.s0, h_t * rate, stride, drift,
        {"t0": p.t0, "t_c": p.t_c, "t_end": p.t_end, "time_step": h_t},
    )


def survival_probability(t: Trajectory, window_fraction: float = DEFAULT_WINDOW_FRACTION) -> float:
    """Mean of ``|c1|**2`` over the trailing ``window_fraction`` of the samples.

    Averaging over the tail smooths the post-crossing oscillations about
    the asymptotic value.
    """
    if not 0 < window_fraction <= 1:
        raise DomainError(f"window_fraction must lie in (0, 1], got {window_fraction!r}")
    count = math.ceil(window_fraction * len(t.c1) - 1e-9)
    if count < 10:
        raise InsufficientDataError(f"survival window holds {count} samples; need at least 10")
    tail = t.c1[-count:]
    return math.fsum(abs(c) ** 2 for c in tail) / count
