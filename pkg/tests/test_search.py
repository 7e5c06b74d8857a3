import pytest

from rovella.family import bisect, map_value
from rovella.search import (period2, preimage_chain, find_super_attractor,
                            find_preperiodic, preperiodic_from_escape,
                            super_sequence, verify_periodic, hits_csv)
from rovella.cli import escape_component


def test_period_two_against_scalar_oracle():
    orb = period2(0.0)
    # independent oracle: 2 t^1.5 + t - 1 = 0 on (0, 1)
    oracle = bisect(lambda t: 2.0 * t ** 1.5 + t - 1.0, 0.0, 1.0, tol=1e-15)
    assert orb.y_plus == pytest.approx(oracle, abs=1e-12)
    assert orb.y_plus == pytest.approx(0.4320, abs=1e-3)
    assert orb.y_minus == -orb.y_plus
    assert orb.multiplier == pytest.approx(9.0 * orb.y_plus, abs=1e-12)
    assert abs(orb.multiplier) > 1.0


def test_period_two_closes():
    for a in (0.0, 0.1, 0.3):
        orb = period2(a)
        assert map_value(a, orb.y_plus) == pytest.approx(orb.y_minus,
                                                         abs=1e-12)
        assert map_value(a, orb.y_minus) == pytest.approx(orb.y_plus,
                                                          abs=1e-12)


def test_preimage_chain_structure():
    ch = preimage_chain(0.0, 8)
    assert len(ch.points) == 9
    for j in range(1, 9):
        assert map_value(0.0, ch.points[j]) == pytest.approx(
            ch.points[j - 1], abs=1e-12)
        assert ch.points[j] < ch.points[j - 1]
    # |y^1| = ((1 - y^0)/2)^(2/3) with y^0 = -y_plus
    y0 = ch.points[0]
    assert abs(ch.points[1]) == pytest.approx(
        ((1.0 - y0) / 2.0) ** (2.0 / 3.0), abs=1e-12)
    assert ch.j0 == 1
    assert ch.j1 == 3
    assert ch.M > 2.0


def test_super_attractor_closed_form():
    hit = find_super_attractor(0.2, 0.4, 3)
    # independent closed form: (2 - a)(1 - a)^1.5 = 1
    oracle = bisect(lambda a: (2.0 - a) * (1.0 - a) ** 1.5 - 1.0,
                    0.2, 0.4, tol=1e-15)
    assert hit.a == pytest.approx(oracle, abs=1e-10)
    assert hit.residual <= 1e-12
    assert hit.period == 3
    # loop closes through the critical point convention
    x = 0.0
    for _ in range(3):
        x = map_value(hit.a, x)
    assert abs(x) <= 1e-10


def test_super_attractor_not_found_for_k2():
    with pytest.raises(ValueError):
        find_super_attractor(0.0, 0.4, 2)


def test_super_attractor_stability_under_tolerance():
    h1 = find_super_attractor(0.2, 0.4, 3, tol=1e-12)
    h2 = find_super_attractor(0.2, 0.4, 3, tol=1e-13)
    assert abs(h1.a - h2.a) < 1e-11


def test_verify_periodic_classifications():
    hit = find_super_attractor(0.2, 0.4, 3)
    assert verify_periodic(hit.a, hit.orbit) == "super-attracting"
    # -1 is a fixed point of f_0 with multiplier 3
    assert verify_periodic(0.0, [-1.0]) == "repelling"
    with pytest.raises(ValueError):
        verify_periodic(0.0, [-0.5])


def test_find_preperiodic_lands_on_orbit():
    hit = find_preperiodic(0.0, 0.28, 6)
    assert hit.residual <= 1e-12
    assert hit.alternation_steps >= 20
    # the landing point is y^- and the next iterate is y^+
    x = -1.0
    for _ in range(hit.k - 1):
        x = map_value(hit.a, x)
    assert x == pytest.approx(hit.y_minus, abs=1e-10)
    assert map_value(hit.a, x) == pytest.approx(hit.y_plus, abs=1e-8)


def test_pipeline_from_probe_escape(probe_run):
    (lo, hi), theta = escape_component(probe_run)
    assert theta == 3
    assert lo == pytest.approx(0.0, abs=1e-12)
    assert hi > 0.25
    pre = preperiodic_from_escape((lo, hi), theta)
    assert lo <= pre.a <= hi
    assert pre.residual <= 1e-12
    assert pre.gamma >= theta + 1
    assert pre.k == pre.gamma + 1 + pre.ell


def test_super_sequence_accumulates(probe_run):
    (lo, hi), theta = escape_component(probe_run)
    pre = preperiodic_from_escape((lo, hi), theta)
    hits = super_sequence(pre, 4)
    assert len(hits) == 4
    ks = [h.k for h in hits]
    assert ks == sorted(ks) and len(set(ks)) == 4
    dists = [h.dist_to_pre for h in hits]
    assert all(dists[i + 1] < dists[i] for i in range(3))
    for h in hits:
        assert h.residual < 1e-12
        assert h.m_shadow is not None and h.rho == h.k - h.m_shadow
        # the shadowing index marks the last visit near the periodic
        # orbit (shallow hits may never get within range: index 0)
        yp = period2(h.a).y_plus
        near = [i for i, x in enumerate(h.orbit)
                if min(abs(x - yp), abs(x + yp)) < 0.05]
        if near:
            assert h.m_shadow == max(near)
        else:
            assert h.m_shadow == 0


def test_hits_csv_format():
    hit = find_super_attractor(0.2, 0.4, 3)
    text = hits_csv([hit])
    lines = text.splitlines()
    assert lines[0] == "a,k,period,type,residual"
    fields = lines[1].split(",")
    assert fields[1] == "3" and fields[3] == "super-attractor"
    assert float(fields[0]) == hit.a
