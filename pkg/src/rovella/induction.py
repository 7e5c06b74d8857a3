"""Generation-by-generation parameter exclusion.

The driver refines a partition of the initial parameter interval
[0, a0]: at each time n every interval is classified (inside a bound
period, free, inessential return, essential return), essential returns
are split at the boundary of the critical neighbourhood and at the cell
edges of retained partition levels, escape components are tracked, and
retention is decided by sampled free-time and growth filters.
Inequality checks are logged per event with their margins; the run
records exact measure bookkeeping.

Desk-scale adaptations (small Delta, short horizons) relative to the
asymptotic construction:

* the deep-return exclusion keeps only partition levels below
  floor(alpha*n); for every horizon reachable here that threshold sits
  below Delta, so an essential return keeps exactly its two escape
  components and excludes the interior of the critical neighbourhood;
* the free-time requirement F_n >= (1-alpha)*n is enforced up to an
  additive allowance of one escape-level bound block, since for short
  horizons a single return already costs more than alpha*n iterates;
* the number of partition components grows exponentially in n, so
  intervals narrower than a resolution floor (chosen below the
  length-decay bound at the final horizon) are no longer split; they
  are retained or excluded atomically by the sampled filters.
"""

import os
import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from rovella.family import DEFAULT_PARAMS, map_deriv, map_value
from rovella.orbit import orbit_array, find_initial_interval
from rovella.combinatorics import (OUTSIDE, CRITICAL, bound_period,
                                   cell_plus_bounds, derive_constants,
                                   itinerary, locate)

__all__ = [
    "ParamInterval",
    "Generation",
    "InductionRun",
    "CheckRecord",
    "refine_step",
    "apply_FA_filter",
    "apply_growth_filter",
    "run_induction",
    "invert_critical_map",
    "deviation_statistic",
    "calibrate_comparability",
]

SCREEN_POINTS = 64     # monotonicity / image screen resolution
FILTER_SAMPLES = 9     # endpoint + 7 interior samples for filters
PARAM_TOL = 1e-13      # bisection tolerance in parameter
CHECK_SLACK = 0.5      # slack factor for desk-scale inequality checks
WIDTH_FLOOR = 1e-4     # resolution floor for further splitting


@dataclass
class ReturnRecord:
    gamma: int
    m: int
    k: int
    essential: bool
    escape: bool


@dataclass
class ParamInterval:
    lo: float
    hi: float
    generation: int = 0
    lineage: str = "0"
    returns: list = field(default_factory=list)
    bound_until: int = 0
    pending_escape_from: int = 0   # >0: escape time awaiting next return
    # incremental runtime state (rebuilt after splits, advanced per step)
    state_n: int = 0
    grid_x: object = None          # screen-grid iterates, SCREEN_POINTS values
    samp_x: object = None          # filter-sample iterates
    samp_D: object = None          # filter-sample cocycles
    fa_F: object = None            # filter-sample free-iterate counts
    fa_bound_until: object = None  # filter-sample bound horizons
    fa_stuck: bool = False         # a sample whose binding never releases

    @property
    def length(self):
        return self.hi - self.lo


@dataclass
class CheckRecord:
    name: str
    n: int
    margin: float
    passed: bool
    lineage: str = ""


@dataclass
class Generation:
    n: int
    intervals: list
    excluded_measure: float = 0.0
    survivor_measure: float = 0.0
    escapes: int = 0
    exclusions: dict = field(default_factory=dict)

    def finalize(self):
        self.survivor_measure = sum(w.length for w in self.intervals)
        self.excluded_measure = sum(self.exclusions.values())


@dataclass
class InductionRun:
    bundle: object
    a0: float
    N1: int
    generations: list
    intervals: list
    checks: list
    quarantined_measure: float
    total_excluded: float
    bookkeeping_drift: float
    clean: bool

    def survivor_measure(self):
        return sum(w.length for w in self.intervals)

    def to_dir(self, path):
        os.makedirs(path, exist_ok=True)
        summary = {
            "bundle": _jsonable(self.bundle.to_dict()),
            "a0": self.a0,
            "N1": self.N1,
            "quarantined_measure": self.quarantined_measure,
            "total_excluded": self.total_excluded,
            "bookkeeping_drift": self.bookkeeping_drift,
            "clean": self.clean,
            "generations": [
                {"n": g.n, "intervals": len(g.intervals),
                 "survivor_measure": g.survivor_measure,
                 "excluded_measure": g.excluded_measure,
                 "escapes": g.escapes,
                 "exclusions": g.exclusions}
                for g in self.generations
            ],
        }
        with open(os.path.join(path, "run.json"), "w") as fh:
            json.dump(summary, fh, indent=1, sort_keys=True)
        with open(os.path.join(path, "survivors_n.csv"), "w") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["lo", "hi", "generation"])
            for itv in self.intervals:
                w.writerow([format(itv.lo, ".17g"), format(itv.hi, ".17g"),
                            itv.generation])
        with open(os.path.join(path, "checks.csv"), "w") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["check", "n", "margin", "pass"])
            for c in self.checks:
                w.writerow([c.name, c.n, format(c.margin, ".17g"),
                            int(c.passed)])


def _jsonable(d):
    return {k: (v if not isinstance(v, float) or math.isfinite(v) else None)
            for k, v in d.items()}


# ---------------------------------------------------------------------------
# parameter-space inversion of the critical orbit


def _invert_targets(lo, hi, n, targets, params, ascending):
    """Parameters where xi_n crosses each target value, by vectorized
    bisection on [lo, hi]; assumes xi_n is monotone on the interval."""
    targets = np.asarray(targets, dtype=float)
    alo = np.full(len(targets), lo)
    ahi = np.full(len(targets), hi)
    iters = max(10, int(math.ceil(math.log2(max((hi - lo) / PARAM_TOL, 2.0)))))
    for _ in range(iters):
        mid = 0.5 * (alo + ahi)
        vals = orbit_array(mid, n, params=params)[n - 1]
        if ascending:
            go_right = vals < targets
        else:
            go_right = vals > targets
        alo = np.where(go_right, mid, alo)
        ahi = np.where(go_right, ahi, mid)
    return 0.5 * (alo + ahi)


def invert_critical_map(interval, n, target, params=DEFAULT_PARAMS):
    """Parameter a in the interval with xi_n(a) = target, by bisection.

    Requires the endpoints to bracket the target and the sampled image
    of xi_n to be monotone on the interval.
    """
    grid = np.linspace(interval.lo, interval.hi, SCREEN_POINTS)
    xi = orbit_array(grid, n, params=params)[n - 1]
    mono = np.diff(xi)
    if not (np.all(mono > 0) or np.all(mono < 0)):
        raise ValueError("diffeomorphism hypothesis violated")
    v_lo, v_hi = xi[0], xi[-1]
    if not (min(v_lo, v_hi) <= target <= max(v_lo, v_hi)):
        raise ValueError("target not bracketed by endpoint images")
    asc = v_hi > v_lo
    return float(_invert_targets(interval.lo, interval.hi, n, [target],
                                 params, asc)[0])


def deviation_statistic(a, n, bundle, params=DEFAULT_PARAMS):
    """Deep-return deviation statistic T_n of a single parameter."""
    return itinerary(a, n, bundle, params=params).T_n


def calibrate_comparability(bundle, a0, n_max, params=DEFAULT_PARAMS,
                            grid=2001, margin=1.2):
    """Empirical comparability constant A.

    Sweeps the initial interval, keeps parameters whose cocycle passes
    the growth requirement, and measures the ratio of parameter to
    space derivative of the critical orbit over all depths.  Returns a
    constant covering all observed ratios with a safety margin.
    """
    avals = np.linspace(0.0, a0, grid)
    xi, dxi = orbit_array(avals, n_max + 1, params=params, want_deriv=True)
    s = params.s
    fac = (2.0 - avals) * s * np.abs(xi) ** (s - 1.0)
    D = np.cumprod(fac, axis=0)
    ok = np.ones(grid, dtype=bool)
    for j in range(1, n_max + 1):
        ok &= D[j - 1] >= bundle.lam ** j
    worst = 1.0
    for n in range(2, n_max + 1):
        ratio = np.abs(dxi[n][ok]) / D[n - 1][ok]
        ratio = ratio[ratio > 0]
        if len(ratio):
            worst = max(worst, float(ratio.max()), float(1.0 / ratio.min()))
    return worst * margin


# ---------------------------------------------------------------------------
# incremental per-interval state


def _init_state(itv, n, bundle, params):
    """Build the runtime state of an interval at time n from scratch."""
    grid = np.linspace(itv.lo, itv.hi, SCREEN_POINTS)
    itv.grid_x = orbit_array(grid, n, params=params)[n - 1]
    samp = np.linspace(itv.lo, itv.hi, FILTER_SAMPLES)
    xi = orbit_array(samp, n, params=params)
    s = params.s
    fac = (2.0 - samp) * s * np.abs(xi) ** (s - 1.0)
    itv.samp_x = xi[n - 1].copy()
    itv.samp_D = np.prod(fac, axis=0)
    itv.fa_F = np.zeros(FILTER_SAMPLES)
    itv.fa_bound_until = np.zeros(FILTER_SAMPLES, dtype=int)
    itv.fa_stuck = False
    zone = math.exp(-(bundle.Delta - 1))
    for i, a in enumerate(samp):
        F = 0
        bu = 0
        for j in range(1, n + 1):
            x = xi[j - 1, i]
            if x == 0.0:
                itv.fa_stuck = True
                break
            if j <= bu:
                continue
            if abs(x) < zone:
                addr = locate(x, bundle)
                try:
                    p = bound_period(a, addr.m, x, bundle, params=params)
                except ValueError:
                    itv.fa_stuck = True
                    break
                bu = j + p
            else:
                F += 1
        itv.fa_F[i] = F
        itv.fa_bound_until[i] = bu
    itv.state_n = n


def _advance_state(itv, n, bundle, params):
    """Advance the runtime state of an interval from time n-1 to n."""
    s = params.s
    grid_a = np.linspace(itv.lo, itv.hi, SCREEN_POINTS)
    samp_a = np.linspace(itv.lo, itv.hi, FILTER_SAMPLES)

    def step(avals, x):
        ax = np.abs(x)
        sgn = np.where(x >= 0, 1.0, -1.0)
        return np.where(ax > 0, sgn * ((2.0 - avals) * ax ** s - 1.0), -1.0)

    itv.samp_D = itv.samp_D * (2.0 - samp_a) * s \
        * np.abs(itv.samp_x) ** (s - 1.0)
    itv.grid_x = step(grid_a, itv.grid_x)
    itv.samp_x = step(samp_a, itv.samp_x)
    # per-sample free-time bookkeeping
    zone = math.exp(-(bundle.Delta - 1))
    for i, a in enumerate(samp_a):
        if itv.fa_stuck:
            break
        x = itv.samp_x[i]
        if x == 0.0:
            itv.fa_stuck = True
            break
        if n <= itv.fa_bound_until[i]:
            continue
        if abs(x) < zone:
            addr = locate(x, bundle)
            try:
                p = bound_period(a, addr.m, x, bundle, params=params)
            except ValueError:
                itv.fa_stuck = True
                break
            itv.fa_bound_until[i] = n + p
        else:
            itv.fa_F[i] += 1
    itv.state_n = n


# ---------------------------------------------------------------------------
# construction checks


def _host_of_segment(seg_lo, seg_hi, bundle):
    mid = 0.5 * (seg_lo + seg_hi)
    addr = locate(mid, bundle)
    if addr in (OUTSIDE, CRITICAL):
        return None
    return addr


def _log_bound_checks(child, n, m, bundle, params, checks,
                      samples=FILTER_SAMPLES):
    """Bound-period inequality checks for a return child at level m."""
    avals = np.linspace(child.lo, child.hi, samples)
    xi = orbit_array(avals, n, params=params)[n - 1]
    cap = bundle.bound_period_cap(m)
    zone = math.exp(-(bundle.Delta - 1))
    p_min = None
    recov_min = math.inf
    deep = abs(m) >= bundle.Delta
    for a, x in zip(avals, xi):
        # only samples that genuinely return (inside the binding zone,
        # on the side matching the host level) carry bound checks
        if x == 0.0 or abs(x) >= zone or (x > 0) != (m > 0):
            continue
        try:
            p = bound_period(a, m, x, bundle, params=params)
        except ValueError:
            continue
        checks.append(CheckRecord("bound_period_cap", n, cap - p, p <= cap,
                                  child.lineage))
        # derivative recovery through the bound period, pointwise; the
        # recovery estimate only covers returns inside the critical
        # neighbourhood, not the fringe at the escape level
        deriv = map_deriv(a, x, params)
        pt = x
        for _ in range(p):
            pt = map_value(a, pt, params)
            deriv *= map_deriv(a, pt, params)
        if deep and abs(x) < bundle.delta:
            need = CHECK_SLACK * math.exp((1.0 - bundle.kappa1) * abs(m))
            checks.append(CheckRecord("bound_recovery_pointwise", n,
                                      deriv - need, deriv >= need,
                                      child.lineage))
            recov_min = min(recov_min, deriv)
        p_min = p if p_min is None else min(p_min, p)
    if deep and recov_min < math.inf:
        need = CHECK_SLACK * math.exp((1.0 - bundle.kappa2) * abs(m))
        checks.append(CheckRecord("bound_recovery_interval", n,
                                  recov_min - need, recov_min >= need,
                                  child.lineage))
    return p_min if p_min is not None else 0


def _split_edges(lo_img, hi_img, bundle, m_keep):
    """Cut points of an essential return inside the image interval.

    Always includes the outer boundaries +-delta of the critical
    neighbourhood.  When the deep-exclusion threshold leaves whole
    levels alive (m_keep >= Delta) the cell edges of those levels and
    the floor below the deepest kept level are included as well; at
    desk-scale horizons the threshold sits below Delta and the whole
    interior of U_Delta is cut away in one piece."""
    edges = set()
    for v in (bundle.delta, -bundle.delta):
        if lo_img < v < hi_img:
            edges.add(v)
    for m in range(bundle.Delta, m_keep + 1):
        top = math.exp(-m)
        width = (math.exp(-m) - math.exp(-(m + 1))) / (m * m)
        for k in range(0, m * m + 1):
            for sgn in (1.0, -1.0):
                v = sgn * (top - k * width)
                if lo_img < v < hi_img:
                    edges.add(v)
    if m_keep >= bundle.Delta:
        floor = math.exp(-(m_keep + 1))
        for v in (floor, -floor):
            if lo_img < v < hi_img:
                edges.add(v)
    return sorted(edges)


# ---------------------------------------------------------------------------
# one refinement step


def refine_step(gen, bundle, params=DEFAULT_PARAMS, checks=None,
                width_floor=WIDTH_FLOOR):
    """Advance the partition from time n-1 to time n."""
    n = gen.n + 1
    if checks is None:
        checks = []
    out = Generation(n=n, intervals=[])
    excl = out.exclusions
    delta = bundle.delta
    w_outer = (math.exp(-bundle.Delta) - math.exp(-(bundle.Delta + 1))) \
        / (bundle.Delta ** 2)
    core = delta - w_outer           # free when the image avoids (-core, core)
    sp = bundle.Delta - 1
    w_sp = (math.exp(-sp) - math.exp(-(sp + 1))) / (sp * sp)

    for itv in gen.intervals:
        if itv.grid_x is None:
            _init_state(itv, n, bundle, params)
        else:
            _advance_state(itv, n, bundle, params)
        # (1) inside a bound period: carried over unchanged
        if n <= itv.bound_until:
            out.intervals.append(itv)
            continue
        xi = itv.grid_x
        lo_img = float(xi.min())
        hi_img = float(xi.max())
        # (2) free time: at most the outermost cells of U_Delta are touched
        if hi_img <= -core or lo_img >= core:
            out.intervals.append(itv)
            continue
        # return situation: resolve pending escape bookkeeping first
        if itv.pending_escape_from:
            length = hi_img - lo_img
            need = CHECK_SLACK * math.exp(-bundle.kappa * bundle.Delta)
            checks.append(CheckRecord("escape_next_return_size", n,
                                      length - need, length >= need,
                                      itv.lineage))
            itv.pending_escape_from = 0
        # below the resolution floor: retained atomically; the interior
        # structure is unresolved and the sampled filters decide its fate
        if itv.length < width_floor:
            out.intervals.append(itv)
            continue
        mono = np.diff(xi)
        ascending = bool(np.all(mono > 0))
        if not ascending and not np.all(mono < 0):
            # fold detected on the screen grid: the interval is removed
            # from the construction (quarantine, accounted separately)
            excl["quarantine"] = excl.get("quarantine", 0.0) + itv.length
            continue

        m_keep = int(math.floor(bundle.alpha * n)) - 1
        edges = _split_edges(lo_img, hi_img, bundle, m_keep)
        if not edges:
            # (3a) inessential return: image inside one extended cell
            host = _host_of_segment(max(lo_img, -0.99), min(hi_img, 0.99),
                                    bundle)
            if host is None:
                # tiny image straddling the critical point: unresolvable
                # residue, excluded
                excl["deep_level"] = excl.get("deep_level", 0.0) + itv.length
                continue
            plo, phi = host.plus_bounds
            margin = min(lo_img - plo, phi - hi_img)
            checks.append(CheckRecord("host_containment_inessential", n,
                                      margin, margin >= -1e-12, itv.lineage))
            p = _log_bound_checks(itv, n, host.m, bundle, params, checks)
            itv.returns.append(ReturnRecord(n, host.m, host.k, False, False))
            itv.bound_until = n + p
            itv.generation = n
            out.intervals.append(itv)
            continue

        # (3b) essential return: split at the preimages of the cut points
        cuts = np.sort(_invert_targets(itv.lo, itv.hi, n, edges, params,
                                       ascending))
        bounds_p = [itv.lo] + list(cuts) + [itv.hi]
        img_edges = sorted(edges)
        segs_asc = [(lo_img, img_edges[0])] + \
            [(img_edges[i], img_edges[i + 1])
             for i in range(len(img_edges) - 1)] + \
            [(img_edges[-1], hi_img)]
        seg_img = segs_asc if ascending else segs_asc[::-1]
        children = []
        idx = 0
        for i in range(len(bounds_p) - 1):
            plo, phi = bounds_p[i], bounds_p[i + 1]
            slo, shi = seg_img[i]
            if phi <= plo:
                continue
            mid = 0.5 * (slo + shi)
            if mid >= delta:
                # a component stands alone as an escape only when it
                # covers the escape cell robustly; an under-covering
                # fringe fragment is kept as a plain child
                kind = "escape" if shi - delta >= 2.0 * w_sp else "fringe"
                m, k = sp, sp * sp
            elif mid <= -delta:
                kind = "escape" if -delta - slo >= 2.0 * w_sp else "fringe"
                m, k = -sp, sp * sp
            else:
                host = _host_of_segment(slo, shi, bundle)
                if host is None or abs(host.m) > max(m_keep,
                                                     bundle.Delta - 1):
                    # inside U_Delta and below the kept-level threshold
                    excl["deep_level"] = excl.get("deep_level", 0.0) \
                        + (phi - plo)
                    continue
                kind, m, k = "cell", host.m, host.k
            idx += 1
            child = ParamInterval(lo=plo, hi=phi, generation=n,
                                  lineage=f"{itv.lineage}.{n}.{idx}",
                                  returns=list(itv.returns),
                                  bound_until=itv.bound_until)
            escape = kind == "escape"
            if not escape:
                plo_b, phi_b = cell_plus_bounds(m, k, bundle.Delta)
                margin = min(slo - plo_b, phi_b - shi)
                checks.append(CheckRecord("host_containment", n, margin,
                                          margin >= -1e-12, child.lineage))
            _init_state(child, n, bundle, params)
            # drop children that already lost cocycle growth before
            # logging construction checks (their binding may never release)
            if child.fa_stuck or not _child_growth_ok(child, n, bundle,
                                                      params):
                excl["growth"] = excl.get("growth", 0.0) + child.length
                continue
            p = _log_bound_checks(child, n, m, bundle, params, checks)
            child.returns.append(ReturnRecord(n, m, k, True, escape))
            if not escape:
                # the whole child returns together, so the interval is
                # carried through the bound period as one piece; an escape
                # component is mostly free and keeps refining
                child.bound_until = n + p
            if escape:
                child.pending_escape_from = n
                out.escapes += 1
            bound = 2.0 * bundle.A * bundle.lam ** (-n) / CHECK_SLACK
            checks.append(CheckRecord("interval_length_decay", n,
                                      bound - child.length,
                                      child.length <= bound, child.lineage))
            children.append(child)
        out.intervals.extend(children)
    out.finalize()
    return out, checks


def _child_growth_ok(child, n, bundle, params):
    avals = np.linspace(child.lo, child.hi, FILTER_SAMPLES)
    xi = orbit_array(avals, n, params=params)
    fac = (2.0 - avals) * params.s * np.abs(xi) ** (params.s - 1.0)
    D = np.cumprod(fac, axis=0)
    need = bundle.lam ** np.arange(1, n + 1)
    return bool(np.all(D.min(axis=1) >= need))


# ---------------------------------------------------------------------------
# filters


def apply_FA_filter(gen, bundle, params=DEFAULT_PARAMS):
    """Remove intervals with a sampled free-time deficit.

    The requirement F_n >= (1-alpha)*n is applied with an additive
    allowance of one escape-level bound block (desk-scale horizons make
    the literal requirement unsatisfiable after any return).
    """
    allowance = math.ceil(bundle.bound_period_cap(bundle.Delta - 1)) + 1
    need = (1.0 - bundle.alpha) * gen.n - allowance
    kept = []
    removed = 0.0
    for itv in gen.intervals:
        if itv.fa_F is not None:
            ok = (not itv.fa_stuck) and bool(np.all(itv.fa_F >= need))
        else:
            ok = True
            for a in np.linspace(itv.lo, itv.hi, FILTER_SAMPLES):
                it = itinerary(a, gen.n, bundle, params=params)
                if it.truncated or it.F_n < need:
                    ok = False
                    break
        if ok:
            kept.append(itv)
        else:
            removed += itv.length
    gen.intervals = kept
    if removed:
        gen.exclusions["free_time"] = gen.exclusions.get("free_time", 0.0) \
            + removed
    gen.finalize()
    return gen


def apply_growth_filter(gen, bundle, params=DEFAULT_PARAMS):
    """Remove intervals whose sampled cocycle loses exponential growth."""
    kept = []
    removed = 0.0
    for itv in gen.intervals:
        if itv.samp_D is not None:
            # the cocycle legitimately dips right after a return and
            # recovers by the end of the bound period, so only samples
            # outside their own bound periods are required to grow
            free_now = gen.n > itv.fa_bound_until
            ok = bool(np.all(itv.samp_D[free_now] >= bundle.lam ** gen.n))
        else:
            ok = _child_growth_ok(itv, gen.n, bundle, params)
        if ok:
            kept.append(itv)
        else:
            removed += itv.length
    gen.intervals = kept
    if removed:
        gen.exclusions["growth"] = gen.exclusions.get("growth", 0.0) + removed
    gen.finalize()
    return gen


# ---------------------------------------------------------------------------
# the full run


def run_induction(n_max, bundle=None, params=DEFAULT_PARAMS, a0=None, N1=None,
                  calibrate_A=True, width_floor=WIDTH_FLOOR):
    """Run the exclusion induction to depth n_max."""
    if bundle is None:
        bundle = derive_constants()
    if a0 is None or N1 is None:
        a0, N1 = find_initial_interval(bundle.Delta, params=params)
    bundle.a0, bundle.N1 = a0, N1
    if calibrate_A:
        bundle.A = calibrate_comparability(bundle, a0, n_max, params=params)
    total = a0
    checks = []
    generations = []
    gen = Generation(n=N1 - 1, intervals=[ParamInterval(lo=0.0, hi=a0)])
    gen.finalize()
    quarantined = 0.0
    excluded_total = 0.0
    for n in range(N1, n_max + 1):
        gen, checks = refine_step(gen, bundle, params=params, checks=checks,
                                  width_floor=width_floor)
        gen = apply_growth_filter(gen, bundle, params=params)
        gen = apply_FA_filter(gen, bundle, params=params)
        gen.finalize()
        quarantined += gen.exclusions.get("quarantine", 0.0)
        excluded_total += gen.excluded_measure
        drift = abs(gen.survivor_measure + excluded_total - total)
        checks.append(CheckRecord("measure_bookkeeping", n, 1e-10 - drift,
                                  drift <= 1e-10))
        total = gen.survivor_measure + excluded_total
        generations.append(gen)
        if not gen.intervals:
            break
    drift = abs(generations[-1].survivor_measure + excluded_total - a0) \
        if generations else 0.0
    clean = quarantined < 0.05 * a0
    return InductionRun(bundle=bundle, a0=a0, N1=N1, generations=generations,
                        intervals=generations[-1].intervals if generations
                        else [], checks=checks,
                        quarantined_measure=quarantined,
                        total_excluded=excluded_total,
                        bookkeeping_drift=drift, clean=clean)
