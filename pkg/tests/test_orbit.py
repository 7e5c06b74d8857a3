import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rovella.family import map_value
from rovella.orbit import (critical_orbit, orbit_array, check_growth,
                           check_basic_assumption, comparability,
                           outside_expansion, find_initial_interval)


def test_orbit_at_zero_parameter():
    # -1 is a fixed point of f_0 with derivative 3, so the cocycle is 3^j
    orb = critical_orbit(0.0, 12)
    assert np.allclose(orb.xi, -1.0)
    assert np.allclose(orb.D, 3.0 ** np.arange(1, 13))


def test_parameter_derivative_recursion_at_zero():
    # along the fixed orbit the recursion gives dxi_{n+1} = 3 dxi_n + 1
    orb = critical_orbit(0.0, 10)
    expected = 0.0
    for k in range(10):
        assert orb.dxi_da[k] == pytest.approx(expected, rel=1e-12)
        expected = 3.0 * expected + 1.0


def test_cocycle_matches_finite_differences():
    rng = np.random.default_rng(7)
    for a in rng.uniform(0.0, 0.35, 12):
        orb = critical_orbit(a, 15)
        h = 1e-8
        x_hi, x_lo = -1.0 + h, -1.0 - h
        for _ in range(15):
            x_hi = map_value(a, x_hi)
            x_lo = map_value(a, x_lo)
        fd = (x_hi - x_lo) / (2 * h)
        assert orb.D[14] == pytest.approx(fd, rel=1e-5)


def test_parameter_derivative_matches_finite_differences():
    rng = np.random.default_rng(11)
    for a in rng.uniform(0.01, 0.35, 12):
        orb = critical_orbit(a, 15)
        h = 1e-8
        hi = critical_orbit(a + h, 15)
        lo = critical_orbit(a - h, 15)
        fd = (hi.xi[14] - lo.xi[14]) / (2 * h)
        assert orb.dxi_da[14] == pytest.approx(fd, rel=1e-4, abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(a=st.floats(0.0, 0.35), n=st.integers(2, 25))
def test_vectorized_orbit_agrees_with_scalar(a, n):
    xi = orbit_array(np.array([a]), n)
    orb = critical_orbit(a, n)
    assert np.allclose(xi[:, 0], orb.xi, atol=1e-14)


def test_growth_and_recurrence_at_zero():
    orb = critical_orbit(0.0, 20)
    assert check_growth(orb, 1.5).passes_EG
    assert check_growth(orb, 3.01).first_failure == 1
    assert check_basic_assumption(orb, 0.03).passes_BA


def test_comparability_at_zero():
    # |dxi_n/da| / D_{n-1} = (3^{n-1} - 1) / (2 * 3^{n-1}) -> 1/2
    val = comparability(0.0, 20)
    assert val == pytest.approx(0.5, abs=1e-6)


def test_outside_expansion_classification():
    deriv, item = outside_expansion(0.0, -1.0, 5, Delta=3)
    assert deriv == pytest.approx(3.0 ** 5)
    assert item == 1
    with pytest.raises(ValueError):
        outside_expansion(0.0, 1e-3, 3, Delta=3)


def test_initial_interval_frozen():
    a0, N1 = find_initial_interval(3)
    assert N1 == 3
    assert a0 == pytest.approx(0.3263699314318019, abs=1e-12)
    # the image of the critical orbit at time N1 must reach past the
    # critical neighbourhood with the default margin
    orb = critical_orbit(a0, N1)
    assert orb.xi[N1 - 1] >= 1.5 * math.exp(-3) - 1e-9


def test_truncation_on_exact_hit():
    orb = critical_orbit(0.29839311281882902, 6)
    # |xi_3| is below double precision resolution but not exactly zero
    assert abs(orb.xi[2]) < 1e-12
