import math

import pytest
from hypothesis import given, settings, strategies as st

from rovella.family import (FamilyParams, DEFAULT_PARAMS, map_value,
                            map_deriv, map_eval, map_zero, verify_axioms,
                            bisect)


def test_default_constants():
    p = DEFAULT_PARAMS
    assert p.s == 1.5
    assert p.a_max == 0.4
    assert p.K0 == pytest.approx((2.0 - 0.4) * 1.5)
    assert p.K1 == pytest.approx(3.0)
    assert p.chi == pytest.approx(-0.625)


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        FamilyParams(s=1.0)
    with pytest.raises(ValueError):
        FamilyParams(a_max=1.5)
    with pytest.raises(ValueError):
        FamilyParams(chi=0.1)


def test_kv_roundtrip():
    p = FamilyParams(s=1.7, a_max=0.3)
    q = FamilyParams.from_kv(p.to_kv())
    assert q == p


def test_map_values():
    assert map_value(0.0, 1.0) == pytest.approx(1.0)
    assert map_value(0.0, -1.0) == pytest.approx(-1.0)
    assert map_value(0.3, 0.0) == -1.0
    # direct formula at an interior point
    assert map_value(0.0, 0.5) == pytest.approx(2.0 * 0.5 ** 1.5 - 1.0)
    assert map_value(0.0, -0.5) == pytest.approx(-(2.0 * 0.5 ** 1.5 - 1.0))


def test_critical_point_needs_side():
    with pytest.raises(ValueError):
        map_eval(0.1, 0.0)
    jet = map_eval(0.1, 0.0, side=1)
    assert jet.f == -1.0
    assert jet.df_dx == 0.0


@settings(max_examples=200, deadline=None)
@given(a=st.floats(0.0, 0.4), x=st.floats(-1.0, 1.0))
def test_jet_matches_finite_differences(a, x):
    if abs(x) < 1e-3 or abs(x) > 1 - 1e-6:
        return
    jet = map_eval(a, x)
    h = 1e-7
    fd_x = (map_value(a, x + h) - map_value(a, x - h)) / (2 * h)
    fd_a = (map_value(a + h, x) - map_value(a - h, x)) / (2 * h) \
        if 0 < a < 0.4 else jet.df_da
    assert jet.df_dx == pytest.approx(fd_x, rel=1e-5, abs=1e-6)
    assert jet.df_da == pytest.approx(fd_a, rel=1e-5, abs=1e-6)


@settings(max_examples=200, deadline=None)
@given(a=st.floats(0.0, 0.4), x=st.floats(1e-6, 1.0))
def test_odd_symmetry(a, x):
    assert map_value(a, -x) == pytest.approx(-map_value(a, x), abs=1e-14)
    assert map_deriv(a, -x) == pytest.approx(map_deriv(a, x), abs=1e-14)


def test_schwarzian_formula():
    jet = map_eval(0.2, 0.3)
    assert jet.schwarzian == pytest.approx(-(1.5 ** 2 - 1.0) / (2 * 0.09))
    assert jet.schwarzian < DEFAULT_PARAMS.chi


def test_bisect_oracle():
    root = bisect(lambda x: x * x - 2.0, 0.0, 2.0, tol=1e-14)
    assert root == pytest.approx(math.sqrt(2.0), abs=1e-12)
    with pytest.raises(ValueError):
        bisect(lambda x: x * x + 1.0, 0.0, 2.0)


def test_map_zero_closed_form():
    for a in (0.0, 0.15, 0.4):
        z = map_zero(a, +1)
        assert z == pytest.approx((1.0 / (2.0 - a)) ** (2.0 / 3.0), abs=1e-12)
        assert map_zero(a, -1) == pytest.approx(-z)


def test_axiom_suite_small_grid():
    report = verify_axioms(n_x=2000, n_a=5)
    assert report.all_passed
    assert all(m > 0 for m in report.margin.values())
