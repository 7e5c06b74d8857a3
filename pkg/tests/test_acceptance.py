"""End-to-end acceptance suite.

Each test pins one of the headline behaviors of the library at desk
scale: the family axioms, the derivative recursions, the period-2 and
super-attractor constructions, the parameter-exclusion induction, the
statistical-instability pipeline, the suspension-flow averages, and
bitwise determinism of the three long pipelines.
"""

import io
import csv
import time

import numpy as np
import pytest

from rovella.family import (DEFAULT_PARAMS, map_value, verify_axioms, bisect)
from rovella.orbit import critical_orbit
from rovella.combinatorics import derive_constants
from rovella.induction import run_induction
from rovella.search import (period2, find_super_attractor,
                            preperiodic_from_escape, super_sequence)
from rovella.measures import instability_table, iterate_snapped
from rovella.flow import SectionPoint, flow_average
from rovella.cli import escape_component

SEQUENCE_DEPTH = 38


@pytest.fixture(scope="module")
def full_run():
    start = time.perf_counter()
    run = run_induction(30, derive_constants())
    return run, time.perf_counter() - start


@pytest.fixture(scope="module")
def pipeline():
    start = time.perf_counter()
    probe = run_induction(10, derive_constants())
    component, theta = escape_component(probe)
    pre = preperiodic_from_escape(component, theta)
    hits = super_sequence(pre, SEQUENCE_DEPTH)
    rows, table_csv = instability_table(hits)
    return (pre, hits, rows, table_csv), time.perf_counter() - start


def test_axiom_suite():
    start = time.perf_counter()
    report = verify_axioms(DEFAULT_PARAMS, n_x=10_000, n_a=20)
    elapsed = time.perf_counter() - start
    assert report.all_passed
    assert min(report.margin.values()) > 0
    # Schwarzian bounded by -(s^2-1)/2 up to round-off
    s = DEFAULT_PARAMS.s
    assert DEFAULT_PARAMS.chi <= -(s * s - 1.0) / 2.0 + 1e-10
    assert elapsed < 5.0


def test_derivative_recursions_match_finite_differences():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    avals = rng.uniform(0.005, 0.35, 100)
    h = 1e-9
    checked = 0
    for a in avals:
        n = int(rng.integers(5, 21))
        orb = critical_orbit(a, n)
        # difference quotients are meaningless across the critical point,
        # where the derivative collapses and the curvature blows up
        if min(abs(x) for x in orb.xi[:n]) < 1e-3:
            continue
        checked += 1
        # space derivative by two-sided differences along the orbit
        x_hi, x_lo = -1.0 + h, -1.0 - h
        for _ in range(n):
            x_hi = map_value(a, x_hi)
            x_lo = map_value(a, x_lo)
        fd_D = (x_hi - x_lo) / (2.0 * h)
        assert orb.D[n - 1] == pytest.approx(fd_D, rel=1e-5)
        # parameter derivative by central differences in a
        hi = critical_orbit(a + h, n)
        lo = critical_orbit(a - h, n)
        fd_da = (hi.xi[n - 1] - lo.xi[n - 1]) / (2.0 * h)
        assert orb.dxi_da[n - 1] == pytest.approx(fd_da, rel=1e-5, abs=1e-7)
    assert checked >= 90
    assert time.perf_counter() - start < 10.0


def test_period_two_orbit():
    start = time.perf_counter()
    orb = period2(0.0)
    oracle = bisect(lambda t: 2.0 * t ** 1.5 + t - 1.0, 0.0, 1.0, tol=1e-15)
    assert orb.y_plus == pytest.approx(0.4320, abs=1e-3)
    assert orb.y_plus == pytest.approx(oracle, abs=1e-12)
    assert orb.multiplier == pytest.approx(9.0 * orb.y_plus, abs=1e-3)
    assert time.perf_counter() - start < 1.0


def test_super_attractor_cross_check():
    start = time.perf_counter()
    hit = find_super_attractor(0.2, 0.4, 3)
    oracle = bisect(lambda a: (2.0 - a) * (1.0 - a) ** 1.5 - 1.0,
                    0.2, 0.4, tol=1e-15)
    assert hit.a == pytest.approx(oracle, abs=1e-10)
    # the period-3 loop closes
    x = 0.0
    for _ in range(3):
        x = map_value(hit.a, x)
    assert abs(x) <= 1e-10
    # basin: 1000 seeds near the critical point converge to the loop
    cycle = [0.0, -1.0, hit.a - 1.0]
    seeds = np.linspace(-1e-3, 1e-3, 1000)
    for x0 in seeds:
        x = float(x0)
        for _ in range(60):
            x = iterate_snapped(hit.a, x)
        assert min(abs(x - c) for c in cycle) < 1e-8
    assert time.perf_counter() - start < 5.0


def test_parameter_exclusion_induction(full_run):
    run, elapsed = full_run
    assert run.survivor_measure() > 0
    # measure bookkeeping closes generation by generation
    book = [c for c in run.checks if c.name == "measure_bookkeeping"]
    assert book and all(c.passed for c in book)
    assert all(c.margin >= 0 for c in book)
    # every logged bound-period check passed
    bound = [c for c in run.checks if c.name.startswith("bound_")]
    assert bound and all(c.passed for c in bound)
    # interval-length decay and escape checks hold with the slack factor
    for name in ("interval_length_decay", "escape_next_return_size"):
        recs = [c for c in run.checks if c.name == name]
        assert recs and all(c.passed for c in recs)
    assert run.quarantined_measure < 0.05 * run.a0
    assert run.clean
    assert elapsed < 300.0


def test_statistical_instability_pipeline(pipeline):
    (pre, hits, rows, _), elapsed = pipeline
    assert pre.residual <= 1e-12
    assert len(hits) >= 3
    dists = [h.dist_to_pre for h in hits]
    assert all(dists[i + 1] < dists[i] for i in range(len(dists) - 1))
    w1 = [r[2] for r in rows]
    inversions = sum(1 for i in range(len(w1) - 1) if w1[i + 1] >= w1[i])
    assert inversions <= 1
    assert w1[-1] < 0.05
    # distance to the reference histogram stays macroscopic
    assert rows[-1][3] > 4.0 * w1[-1]
    assert elapsed < 600.0


def test_flow_time_averages():
    start = time.perf_counter()
    hit = find_super_attractor(0.2, 0.4, 3)
    averages = []
    for T in (1e2, 1e3, 1e4):
        res = flow_average(hit.a, SectionPoint(-1.0, 0.0), T=T)
        averages.append(res.average)
    assert averages[0] > averages[1] > averages[2]
    assert averages[2] <= 0.05
    assert res.dwell >= 0.9
    # visit-ratio bound: m / T <= 2 m / (T_1 + ... + T_m)
    m = len(res.visits)
    assert m / res.T <= 2.0 * m / sum(res.visits)
    # contrast at a = 0 from the fixed leaf
    contrast = flow_average(0.0, SectionPoint(-1.0, 0.0), T=1e3)
    assert contrast.average >= 0.3
    assert time.perf_counter() - start < 120.0


def _survivors_csv(run):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for itv in run.intervals:
        w.writerow([format(itv.lo, ".17g"), format(itv.hi, ".17g")])
    return buf.getvalue()


def test_determinism_of_pipelines(full_run, pipeline):
    run, _ = full_run
    (_, _, _, table_csv), _ = pipeline
    # rerun the induction and compare survivor sets bit for bit
    again = run_induction(30, derive_constants())
    assert _survivors_csv(run) == _survivors_csv(again)
    # rerun the instability pipeline
    probe = run_induction(10, derive_constants())
    component, theta = escape_component(probe)
    pre = preperiodic_from_escape(component, theta)
    hits = super_sequence(pre, SEQUENCE_DEPTH)
    _, table_again = instability_table(hits)
    assert table_csv == table_again
    # rerun the flow average and compare the emitted series
    hit = find_super_attractor(0.2, 0.4, 3)
    r1 = flow_average(hit.a, SectionPoint(-1.0, 0.0), T=1e3)
    r2 = flow_average(hit.a, SectionPoint(-1.0, 0.0), T=1e3)
    assert r1.to_csv() == r2.to_csv()
