import pytest

from rovella.family import bisect
from rovella.orbit import critical_orbit, find_initial_interval
from rovella.induction import (ParamInterval, invert_critical_map,
                               calibrate_comparability, run_induction,
                               WIDTH_FLOOR)


def test_invert_critical_map_hits_target(bundle):
    a0, N1 = find_initial_interval(bundle.Delta)
    itv = ParamInterval(lo=0.0, hi=a0)
    target = -0.2
    a = invert_critical_map(itv, N1, target)
    orb = critical_orbit(a, N1)
    assert orb.xi[N1 - 1] == pytest.approx(target, abs=1e-9)
    # independent scalar bisection oracle
    oracle = bisect(lambda t: critical_orbit(t, N1).xi[N1 - 1] - target,
                    0.0, a0, tol=1e-14)
    assert a == pytest.approx(oracle, abs=1e-10)


def test_invert_critical_map_rejects_unbracketed(bundle):
    a0, N1 = find_initial_interval(bundle.Delta)
    itv = ParamInterval(lo=0.0, hi=a0)
    with pytest.raises(ValueError):
        invert_critical_map(itv, N1, 0.9)


def test_comparability_calibration_frozen(bundle):
    a0, _ = find_initial_interval(bundle.Delta)
    A = calibrate_comparability(bundle, a0, 30)
    assert A == pytest.approx(4.542430428305564, rel=1e-9)
    assert A < 10.0


def test_short_run_bookkeeping(bundle):
    run = run_induction(8, bundle)
    assert run.survivor_measure() > 0
    assert run.bookkeeping_drift < 1e-10
    assert run.clean
    # exclusions plus survivors account for the initial interval
    total = run.survivor_measure() + run.total_excluded
    assert total == pytest.approx(run.a0, abs=1e-10)
    assert all(c.passed for c in run.checks)


def test_short_run_deterministic(bundle):
    r1 = run_induction(6, bundle)
    r2 = run_induction(6, bundle)
    ends1 = [(w.lo, w.hi) for w in r1.intervals]
    ends2 = [(w.lo, w.hi) for w in r2.intervals]
    assert ends1 == ends2


def test_interval_widths_respect_decay(bundle):
    run = run_induction(12, bundle)
    bound = 2.0 * bundle.A * bundle.lam ** (-12) / 0.5
    for itv in run.intervals:
        assert itv.length <= max(bound, WIDTH_FLOOR * 4)
