import json
import math

import pytest

from crossing_lab.errors import DomainError
from crossing_lab.io import dumps_json
from crossing_lab.lz import LZComparison, lz_compare, lz_survival


def test_lz_survival_values():
    assert lz_survival(2 * math.pi) == pytest.approx(math.exp(-1), rel=1e-15)
    assert lz_survival(2 * math.pi) == pytest.approx(0.3678794, abs=1e-7)
    assert lz_survival(10.0) == pytest.approx(0.5334880, abs=1e-7)
    assert lz_survival(1e9) >= 1 - 1e-8
    assert lz_survival(0.0) == 0.0


@pytest.mark.parametrize("lam", [-1.0, math.nan])
def test_lz_survival_rejects(lam):
    with pytest.raises(DomainError):
        lz_survival(lam)


def test_lz_survival_strictly_increasing():
    lams = [0.1 * 1.3**k for k in range(40)]
    values = [lz_survival(x) for x in lams]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert all(0 < v < 1 for v in values)


@pytest.mark.parametrize("lam", [4.0, 10.0])
def test_lz_compare_within_band(lam):
    c = lz_compare(lam)
    assert (c.s0, c.s_end, c.step) == (-10.0, 50.0, 5e-4)
    assert c.p1_analytic == pytest.approx(math.exp(-2 * math.pi / lam))
    assert c.abs_error == abs(c.p1_numeric - c.p1_analytic)
    assert c.rel_error == pytest.approx(c.abs_error / c.p1_analytic)
    assert c.abs_error <= 0.02


def test_lz_compare_lambda_four_limit():
    assert lz_compare(4.0).p1_analytic == pytest.approx(0.2079, abs=1e-4)


def test_lz_compare_adiabatic_limit():
    # starting in phi1 at finite s0 puts sin^2(theta0) of the population on the
    # upper adiabatic curve, tan(2 theta0) = 2 / (lam |s0|); adiabatic following
    # carries that share back into phi1 after the crossing
    c = lz_compare(0.5)
    assert c.p1_analytic == pytest.approx(3.487e-6, rel=1e-3)
    theta0 = 0.5 * math.atan2(2.0, 0.5 * 10.0)
    assert c.p1_numeric == pytest.approx(math.sin(theta0) ** 2, abs=2e-3)
    # an earlier start approaches complete transfer
    assert lz_compare(0.5, s0=-40.0).p1_numeric <= 0.01


def test_lz_compare_window_growth_is_flat():
    errors = [lz_compare(10.0, s_end=s_end).abs_error for s_end in (20.0, 50.0, 100.0)]
    assert errors[1] <= errors[0] + 1e-3
    assert errors[2] <= errors[1] + 1e-3


def test_lz_compare_rejects_nonpositive():
    with pytest.raises(DomainError):
        lz_compare(0.0)


def test_comparison_json_keys():
    c = LZComparison(10.0, 0.5, 0.53, 0.03, 0.056, -10.0, 50.0, 5e-4)
    parsed = json.loads(dumps_json(c.to_dict()))
    assert list(parsed) == ["lambda", "p1_numeric", "p1_analytic", "abs_error",
                            "rel_error", "s0", "s_end", "step"]
