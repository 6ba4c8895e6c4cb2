import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crossing_lab.errors import BracketError, DomainError
from crossing_lab.model import (
    PRESETS,
    CustomModel,
    IonicCovalent,
    LinearCrossing,
    adiabatic_solve,
    evaluate_diabatic,
    find_crossing,
    preset,
    sample_curves,
    slope_difference,
)

TOY = PRESETS["toy"]
IONIC = IonicCovalent(covalent_level=0.0, ionic_asymptote=1.0, coulomb_coefficient=5.0, h12=0.05)


def residual(sol):
    """Max |H c - E c| over both columns, scaled by max(1, ||H||)."""
    H = np.array([[sol.H11, sol.H12], [np.conj(sol.H12), sol.H22]])
    scale = max(1.0, np.abs(H).max())
    worst = 0.0
    for E, col in ((sol.E1, (sol.c11, sol.c21)), (sol.E2, (sol.c12, sol.c22))):
        v = np.array(col)
        worst = max(worst, np.abs(H @ v - E * v).max())
    return worst / scale


def test_toy_preset_is_the_reference_toy_model():
    assert TOY == LinearCrossing(1.0, 1.0, 2.0, -1.0, 0.1)


@pytest.mark.parametrize(
    "model, R, expected",
    [
        (TOY, 0.0, (1.0, 2.0, 0.1)),
        (TOY, 0.5, (1.5, 1.5, 0.1)),
        (IONIC, 5.0, (0.0, 0.0, 0.05)),
    ],
)
def test_evaluate_diabatic(model, R, expected):
    h11, h22, h12 = evaluate_diabatic(model, R)
    assert h11 == pytest.approx(expected[0], abs=1e-15)
    assert h22 == pytest.approx(expected[1], abs=1e-15)
    assert h12 == pytest.approx(expected[2], abs=1e-15)


@pytest.mark.parametrize("R", [0.0, -1.0, math.inf, math.nan])
def test_ionic_covalent_domain(R):
    with pytest.raises(DomainError):
        evaluate_diabatic(IONIC, R)


def test_custom_model_domain_and_finiteness():
    model = CustomModel(lambda R: 1 / R if R else math.inf, lambda R: 0.0, lambda R: 0.1, r_min=0.0)
    with pytest.raises(DomainError):
        evaluate_diabatic(model, -1.0)
    with pytest.raises(DomainError):
        evaluate_diabatic(model, 0.0)
    assert evaluate_diabatic(model, 1.0) == (1.0, 0.0, 0.1 + 0j)


def test_adiabatic_solve_at_crossing():
    sol = adiabatic_solve(1.5, 1.5, 0.1)
    assert sol.E1 == pytest.approx(1.4, abs=1e-14)
    assert sol.E2 == pytest.approx(1.6, abs=1e-14)
    assert sol.gap == pytest.approx(0.2, abs=1e-14)
    assert sol.c11sq == pytest.approx(0.5, abs=1e-14)


def test_adiabatic_solve_crossing_states_complex_coupling():
    # psi1 = (phi1 - (|H12|/H12) phi2)/sqrt2, psi2 = (phi1 + (|H12|/H12) phi2)/sqrt2
    h12 = 0.1 * cmath.exp(0.7j)
    sol = adiabatic_solve(0.3, 0.3, h12)
    ratio = abs(h12) / h12
    r2 = 1 / math.sqrt(2)
    assert sol.c11 == pytest.approx(r2, abs=1e-14)
    assert sol.c21 == pytest.approx(-ratio * r2, abs=1e-14)
    assert sol.c12 == pytest.approx(r2, abs=1e-14)
    assert sol.c22 == pytest.approx(ratio * r2, abs=1e-14)


def test_adiabatic_solve_off_crossing_matches_numpy():
    # frozen from numpy.linalg.eigh on [[1, 0.1], [0.1, 2]]
    sol = adiabatic_solve(1.0, 2.0, 0.1)
    assert sol.E1 == pytest.approx(0.9900980, abs=5e-8)
    assert sol.E2 == pytest.approx(2.0099020, abs=5e-8)
    assert sol.gap == pytest.approx(1.0198039, abs=5e-8)
    assert sol.c11sq == pytest.approx(0.990290, abs=5e-7)
    w, v = np.linalg.eigh(np.array([[1.0, 0.1], [0.1, 2.0]]))
    assert sol.E1 == pytest.approx(w[0], abs=1e-14)
    assert sol.c11sq == pytest.approx(v[0, 0] ** 2, abs=1e-14)


@pytest.mark.parametrize(
    "H11, H22, lower, upper",
    [
        (1.0, 2.0, (1, 0), (0, 1)),
        (2.0, 1.0, (0, -1), (1, 0)),
        (1.0, 1.0, (1, 0), (0, 1)),
    ],
)
def test_adiabatic_solve_uncoupled(H11, H22, lower, upper):
    sol = adiabatic_solve(H11, H22, 0.0)
    assert sol.E1 == min(H11, H22) and sol.E2 == max(H11, H22)
    assert (sol.c11, sol.c21) == lower
    assert (sol.c12, sol.c22) == upper


def test_uncoupled_branch_is_the_weak_coupling_limit():
    for H11, H22 in ((1.0, 2.0), (2.0, 1.0)):
        weak = adiabatic_solve(H11, H22, 1e-9)
        exact = adiabatic_solve(H11, H22, 0.0)
        for a, b in zip((weak.c11, weak.c21, weak.c12, weak.c22),
                        (exact.c11, exact.c21, exact.c12, exact.c22)):
            assert abs(a - b) < 1e-8


finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)


@settings(max_examples=300, deadline=None)
@given(finite, finite, finite, finite)
def test_eigen_identities(H11, H22, re12, im12):
    H12 = complex(re12, im12)
    sol = adiabatic_solve(H11, H22, H12)
    scale = max(1.0, abs(H11), abs(H22), abs(H12))
    assert sol.E1 <= sol.E2
    assert abs(sol.E1 + sol.E2 - (H11 + H22)) <= 1e-12 * scale
    assert abs(sol.E1 * sol.E2 - (H11 * H22 - abs(H12) ** 2)) <= 1e-12 * scale**2
    assert sol.gap >= 2 * abs(H12) * (1 - 1e-15)
    assert residual(sol) <= 1e-12
    for a, b in ((sol.c11, sol.c21), (sol.c12, sol.c22)):
        assert abs(abs(a) ** 2 + abs(b) ** 2 - 1) <= 1e-12
        assert a.imag == 0 and a.real >= 0
    overlap = sol.c11.conjugate() * sol.c12 + sol.c21.conjugate() * sol.c22
    assert abs(overlap) <= 1e-12


def test_find_crossing():
    assert find_crossing(TOY, 0.0, 1.0) == 0.5
    assert find_crossing(IONIC, 1.0, 20.0) == pytest.approx(5.0, abs=1e-10)
    h11, h22, _ = evaluate_diabatic(IONIC, find_crossing(IONIC, 1.0, 20.0))
    assert abs(h11 - h22) <= 1e-12 * max(1.0, abs(h11) + abs(h22))


def test_find_crossing_reversed_bracket():
    assert find_crossing(TOY, 1.0, 0.0) == 0.5


def test_find_crossing_without_sign_change():
    with pytest.raises(BracketError):
        find_crossing(TOY, 0.6, 1.0)


def test_find_crossing_multiple_roots_returns_one_of_them():
    model = CustomModel(lambda R: math.sin(R), lambda R: 0.0, lambda R: 0.1)
    root = find_crossing(model, 0.5, 10.0)
    assert min(abs(root - k * math.pi) for k in (1, 2, 3)) < 1e-9


def test_slope_difference():
    assert slope_difference(TOY, 0.5) == 2.0
    # d/dR of E_cov - (D - C/R) = -C/R**2, checked against a central difference
    fd = ((0.0 - (1 - 5 / 5.001)) - (0.0 - (1 - 5 / 4.999))) / 0.002
    assert slope_difference(IONIC, 5.0) == pytest.approx(-0.2, abs=1e-15)
    assert fd == pytest.approx(-0.2, abs=1e-6)


def test_slope_difference_custom_finite_difference():
    custom = CustomModel(lambda R: 1 + R, lambda R: 2 - R, lambda R: 0.1)
    assert slope_difference(custom, 0.5) == pytest.approx(2.0, abs=1e-6)
    curved = CustomModel(lambda R: R**3, lambda R: 0.0, lambda R: 0.1)
    assert slope_difference(curved, 2.0) == pytest.approx(12.0, abs=1e-6)


def test_slope_difference_custom_near_domain_edge():
    curved = CustomModel(lambda R: R**2, lambda R: 0.0, lambda R: 0.1, r_min=0.0, r_max=1.0)
    assert slope_difference(curved, 1.0 - 1e-9) == pytest.approx(2.0, abs=1e-6)
    with pytest.raises(DomainError):
        slope_difference(curved, 1.5)


def test_sample_curves_order_and_values():
    sols = sample_curves(TOY, [0.0, 0.5, 1.0])
    assert [s.R for s in sols] == [0.0, 0.5, 1.0]
    # R = 1 mirrors R = 0
    assert [s.E1 for s in sols] == pytest.approx([0.99010, 1.4, 0.99010], abs=5e-6)
    assert sols[1].c11sq == pytest.approx(0.5, abs=1e-14)


def test_sample_curves_character_swap():
    grid = [i / 200 for i in range(201)]
    c11sq = [s.c11sq for s in sample_curves(TOY, grid)]
    assert c11sq[0] >= 0.99 and c11sq[-1] <= 0.01
    assert all(b < a for a, b in zip(c11sq, c11sq[1:]))


def test_sample_curves_gap_minimum_at_crossing():
    grid = [i / 200 for i in range(201)]
    gaps = [s.gap for s in sample_curves(IONIC, [1 + 19 * g for g in grid])]
    R_c = find_crossing(IONIC, 1.0, 20.0)
    nearest = min(range(len(grid)), key=lambda i: abs(1 + 19 * grid[i] - R_c))
    assert gaps.index(min(gaps)) == nearest


def test_sample_curves_reports_offending_R():
    with pytest.raises(DomainError, match="R=-1"):
        sample_curves(IONIC, [1.0, -1.0])


def test_preset_overrides():
    assert preset("toy", h12=0.0).h12 == 0.0
    with pytest.raises(DomainError):
        preset("nope")
