"""Parameter searches around the period-2 orbit.

Constructions implemented here:

* the repelling period-2 orbit {y_a^-, y_a^+} of f_a (odd symmetry
  reduces it to the scalar equation f_a(t) = -t on (0, O_a^+));
* super-attractor parameters: roots of xi_k(a) = 0, located by
  bisection of a sign change of the critical orbit;
* preperiodic parameters: roots of xi_k(a) = y_a^-, after which the
  critical orbit alternates between the two periodic points;
* sequences of super-attractor parameters accumulating on a preperiodic
  parameter, found by scanning hitting indices in nested shrinking
  neighborhoods.

Double precision resolves hitting indices only up to roughly 45 steps
past the landing index (each further step multiplies the parameter
sensitivity by the orbit multiplier ~ 3.9, and the crossing windows
shrink below one ulp).  The nested-neighborhood search therefore runs
in extended precision (mpmath) and reports results both as floats and
as decimal strings.
"""

import io
import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from mpmath import mp, mpf

from rovella.family import DEFAULT_PARAMS, bisect, map_value, map_deriv
from rovella.orbit import critical_orbit, orbit_array

__all__ = [
    "PeriodTwoOrbit",
    "PreimageChain",
    "SuperAttractorHit",
    "PreperiodicHit",
    "period2",
    "preimage_chain",
    "find_super_attractor",
    "find_preperiodic",
    "preperiodic_from_escape",
    "super_sequence",
    "verify_periodic",
    "hits_csv",
]

SEQUENCE_DPS = 80      # working precision of the nested-neighborhood search
SHRINK = 8             # neighborhood shrink factor per sequence step


@dataclass
class PeriodTwoOrbit:
    y_minus: float
    y_plus: float
    multiplier: float


@dataclass
class PreimageChain:
    points: list         # y^0 .. y^j, successive preimages of y_a^-
    j0: int              # first index with y^j below x0
    j1: int              # first index with |-1 - y^j| < K1 delta^s
    M: float             # expansion lower bound on [-1, x0]
    x0: float


@dataclass
class SuperAttractorHit:
    a: float
    k: int
    period: int
    orbit: list
    residual: float
    a_str: str = ""
    dist_to_pre: Optional[float] = None
    m_shadow: Optional[int] = None
    rho: Optional[int] = None


@dataclass
class PreperiodicHit:
    a: float
    k: int
    ell: Optional[int]
    residual: float
    y_minus: float
    y_plus: float
    alternation_steps: int
    gamma: Optional[int] = None   # returning situation, k = gamma + 1 + ell


# ---------------------------------------------------------------------------
# period-2 orbit and preimage chain


def period2(a, params=DEFAULT_PARAMS):
    """Repelling period-2 orbit of f_a.

    Solves f_a(t) = -t on (0, O_a^+), which by odd symmetry captures
    the full orbit; the multiplier is the chain-rule product of f_a'
    over the two points.
    """
    s = params.s

    def g(t):
        return (2.0 - a) * t ** s - 1.0 + t

    if g(1e-12) * g(1.0) > 0:
        raise ValueError("no period-2 orbit in range")
    y_plus = bisect(g, 1e-12, 1.0, tol=1e-15)
    y_minus = -y_plus
    multiplier = map_deriv(a, y_plus, params) * map_deriv(a, y_minus, params)
    return PeriodTwoOrbit(y_minus=y_minus, y_plus=y_plus,
                          multiplier=float(multiplier))


def preimage_chain(a, count, params=DEFAULT_PARAMS, Delta=3, x0=-0.5):
    """Successive preimages of y_a^- inside [-1, 0).

    The chain y^0 = y_a^- > y^1 > y^2 > ... decreases toward -1, with
    f_a(y^j) = y^{j-1}.  For a > 0 the chain leaves [-1, 0) after
    finitely many steps and is truncated there.  Reports the thresholds
    j0 (first index below x0, from where the expansion bound f' >= M
    applies) and j1 (first index within K1 delta^s of -1).
    """
    s = params.s
    y0 = period2(a, params).y_minus
    pts = [y0]
    for _ in range(count):
        t = pts[-1]
        # preimage in [-1, 0): f(y) = -((2-a)|y|^s - 1) = t
        mag = ((1.0 - t) / (2.0 - a)) ** (1.0 / s)
        y = -mag
        if not -1.0 <= y < 0.0:
            break
        if abs(map_value(a, y, params) - t) > 1e-12:
            raise ValueError("preimage chain lost closure")
        pts.append(y)
    M = float(map_deriv(a, x0, params))
    thresh = params.K1 * math.exp(-Delta) ** s
    j0 = next((j for j, y in enumerate(pts) if y < x0), len(pts))
    j1 = next((j for j, y in enumerate(pts) if abs(-1.0 - y) < thresh),
              len(pts))
    return PreimageChain(points=pts, j0=j0, j1=j1, M=M, x0=x0)


# ---------------------------------------------------------------------------
# super-attractors


def _xi_k(a, k, params):
    return critical_orbit(a, k, params=params).xi[k - 1]


def _snap_to_zero(a, k, params, halfwidth=512):
    """Walk ulp-neighbors of a to minimize |xi_k|, preferring an exact
    floating-point zero of the computed orbit."""
    best_a, best_v = a, abs(_xi_k(a, k, params))
    step = math.ulp(a)
    cand = a + np.arange(-halfwidth, halfwidth + 1) * step
    cand = cand[(cand >= 0.0) & (cand <= params.a_max)]
    xi = orbit_array(cand, k, params=params)[k - 1]
    i = int(np.argmin(np.abs(xi)))
    if abs(xi[i]) < best_v:
        best_a, best_v = float(cand[i]), abs(float(xi[i]))
    return best_a, best_v


def find_super_attractor(lo, hi, k, params=DEFAULT_PARAMS, tol=1e-12):
    """Parameter in [lo, hi] whose critical orbit hits 0 at index k.

    Bisects a sign change of xi_k over the interval, then refines to
    the ulp neighbor minimizing |xi_k|.
    """
    if k < 2:
        raise ValueError("hitting index must be at least 2")
    grid = np.linspace(lo, hi, 256)
    xi = orbit_array(grid, k, params=params)[k - 1]
    flips = np.nonzero(np.sign(xi[:-1]) != np.sign(xi[1:]))[0]
    if len(flips) == 0:
        raise ValueError("no sign change of the critical orbit in range")
    i = int(flips[0])
    a = bisect(lambda t: _xi_k(t, k, params), grid[i], grid[i + 1], tol=0.0)
    a, residual = _snap_to_zero(a, k, params)
    if residual > tol:
        raise ValueError("sign change did not refine below tolerance")
    orb = [0.0] + list(critical_orbit(a, k, params=params).xi[: k - 1])
    return SuperAttractorHit(a=a, k=k, period=k, orbit=orb,
                             residual=residual, a_str=format(a, ".17g"))


def verify_periodic(a, orbit, params=DEFAULT_PARAMS, tol=1e-10):
    """Classify a periodic orbit candidate.

    The orbit must close under f_a to the tolerance.  Returns one of
    "super-attracting" (contains the critical point), "attracting",
    "repelling" or "neutral" by the multiplier.
    """
    pts = list(orbit)
    for i, x in enumerate(pts):
        nxt = pts[(i + 1) % len(pts)]
        if abs(map_value(a, x, params) - nxt) > tol:
            raise ValueError("orbit does not close")
    if any(abs(x) <= tol for x in pts):
        return "super-attracting"
    mult = 1.0
    for x in pts:
        mult *= map_deriv(a, x, params)
    if abs(mult) < 1.0:
        return "attracting"
    if abs(mult) > 1.0:
        return "repelling"
    return "neutral"


# ---------------------------------------------------------------------------
# preperiodic parameters


def find_preperiodic(lo, hi, k, params=DEFAULT_PARAMS, tol=1e-12, grid=257):
    """Parameter in [lo, hi] with xi_k(a) = y_a^-.

    Bisects the first sign change of g(a) = xi_k(a) - y_a^- on a scan
    grid, then verifies that the critical orbit alternates between the
    two periodic points for as many steps as double precision supports
    (each step multiplies the drift by ~ sqrt of the orbit multiplier).
    """
    avals = np.linspace(lo, hi, grid)
    xi = orbit_array(avals, k, params=params)[k - 1]
    ym = np.array([-period2(a, params).y_plus for a in avals])
    g = xi - ym
    flips = np.nonzero(np.sign(g[:-1]) != np.sign(g[1:]))[0]
    if len(flips) == 0:
        raise ValueError("no sign change of xi_k - y^- in range")
    i = int(flips[0])

    def gfun(a):
        return _xi_k(a, k, params) + period2(a, params).y_plus

    a = bisect(gfun, avals[i], avals[i + 1], tol=0.0)
    orb2 = period2(a, params)
    residual = abs(_xi_k(a, k, params) - orb2.y_minus)
    if residual > tol:
        raise ValueError("root did not refine below tolerance")
    # closure of the periodic pair itself
    if abs(map_value(a, orb2.y_minus, params) - orb2.y_plus) > 1e-12 or \
            abs(map_value(a, orb2.y_plus, params) - orb2.y_minus) > 1e-12:
        raise ValueError("period-2 orbit lost closure")
    # alternation for as long as the drift stays resolvable
    horizon = 50
    tail = critical_orbit(a, k + horizon, params=params).xi
    steps = 0
    for j in range(horizon):
        target = orb2.y_minus if j % 2 == 0 else orb2.y_plus
        if abs(tail[k - 1 + j] - target) > 1e-6:
            break
        steps += 1
    if steps < 20:
        raise ValueError("alternation not verifiable from the hit")
    return PreperiodicHit(a=a, k=k, ell=None, residual=residual,
                          y_minus=orb2.y_minus, y_plus=orb2.y_plus,
                          alternation_steps=steps)


def preperiodic_from_escape(escape_interval, theta, params=DEFAULT_PARAMS,
                            Delta=3, ell_max=12):
    """Preperiodic parameter inside an escape component.

    Starting from an escape component created at time theta, finds the
    next returning situation gamma (first time the interval's image
    meets the core of the critical neighbourhood), builds the preimage
    chain of y^- to choose the chain depth, and locates a root of
    xi_{gamma+1+ell}(a) = y_a^- inside the component, increasing ell as
    needed.
    """
    lo, hi = escape_interval
    delta = math.exp(-Delta)
    w_out = (math.exp(-Delta) - math.exp(-(Delta + 1))) / (Delta * Delta)
    core = delta - w_out
    grid = np.linspace(lo, hi, 64)
    gamma = None
    for n in range(theta + 1, theta + 60):
        img = orbit_array(grid, n, params=params)[n - 1]
        if img.min() < core and img.max() > -core:
            gamma = n
            break
    if gamma is None:
        raise ValueError("escape component has no returning situation")
    chain = preimage_chain(0.5 * (lo + hi), ell_max + 1, params=params,
                           Delta=Delta)
    order = sorted(range(1, ell_max + 1),
                   key=lambda e: abs(e - (chain.j1 + 1)))
    last_err = None
    for ell in order:
        try:
            hit = find_preperiodic(lo, hi, gamma + 1 + ell, params=params)
            hit.ell = ell
            hit.gamma = gamma
            return hit
        except ValueError as err:
            last_err = err
    raise ValueError(f"no preperiodic hit for any chain depth: {last_err}")


# ---------------------------------------------------------------------------
# super-attractor sequences in extended precision


def _mp_value(a, x, s):
    if x == 0:
        return mpf(-1)
    sgn = 1 if x > 0 else -1
    return sgn * ((2 - a) * abs(x) ** s - 1)


def _mp_xi(a, k, s):
    x = mpf(-1)
    for _ in range(k - 1):
        x = _mp_value(a, x, s)
    return x


def _mp_yplus(a, s):
    lo, hi = mpf("1e-12"), mpf(1)
    for _ in range(mp.prec + 10):
        mid = (lo + hi) / 2
        if (2 - a) * mid ** s - 1 + mid > 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def _mp_refine_preperiodic(a_float, k, s, width=mpf("1e-10")):
    """Polish a preperiodic root to working precision."""
    lo = mpf(repr(float(a_float))) - width
    hi = mpf(repr(float(a_float))) + width

    def g(a):
        return _mp_xi(a, k, s) + _mp_yplus(a, s)

    glo = g(lo)
    if glo * g(hi) > 0:
        raise ValueError("high-precision bracket lost the root")
    for _ in range(mp.prec + 10):
        mid = (lo + hi) / 2
        if g(mid) * glo <= 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def super_sequence(pre, depth, params=DEFAULT_PARAMS, k_cap=250, r=0.05,
                   width0=1e-4, shrink=SHRINK, dps=SEQUENCE_DPS):
    """Sequence of super-attractor parameters accumulating on pre.a.

    Scans hitting indices k in increasing order inside nested
    neighborhoods of the preperiodic parameter; each neighborhood is
    the previous hit's distance shrunk by the given factor, so the
    distances |a_n - a_pre| decrease strictly.  Runs in extended
    precision; orbits are reported as floats.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    old_dps = mp.dps
    mp.dps = dps
    try:
        s = mpf(params.s)
        a_pre = _mp_refine_preperiodic(pre.a, pre.k, s)
        yp = _mp_yplus(a_pre, s)
        ym = -yp
        hits = []
        w = mpf(repr(width0))
        prev_k = pre.k
        parity = None
        for _ in range(depth):
            found = None
            for k in range(prev_k + 1, k_cap + 1):
                # keep the parity of the first hit: the alternating tail
                # then ends on the same side every time, so the
                # transport imbalance shrinks monotonically with k
                if parity is not None and (k - parity) % 2:
                    continue
                n_g = 33
                vals = [_mp_xi(a_pre - w + 2 * w * mpf(i) / (n_g - 1), k, s)
                        for i in range(n_g)]
                flips = [i for i in range(n_g - 1)
                         if (vals[i] < 0) != (vals[i + 1] < 0)]
                if not flips:
                    continue
                i = flips[0]
                alo = a_pre - w + 2 * w * mpf(i) / (n_g - 1)
                ahi = a_pre - w + 2 * w * mpf(i + 1) / (n_g - 1)
                neg = vals[i] < 0
                for _ in range(mp.prec + 10):
                    amid = (alo + ahi) / 2
                    if (_mp_xi(amid, k, s) < 0) == neg:
                        alo = amid
                    else:
                        ahi = amid
                found = (k, (alo + ahi) / 2)
                break
            if found is None:
                break   # neighborhood exhausted: return the partial list
            k, a_n = found
            if parity is None:
                parity = k
            orb_mp = [mpf(0)]
            x = mpf(0)
            for _ in range(k - 1):
                x = _mp_value(a_n, x, s)
                orb_mp.append(x)
            dists = [min(abs(x - ym), abs(x - yp)) for x in orb_mp]
            shadow = [i for i, d in enumerate(dists) if d < r]
            m_shadow = max(shadow) if shadow else 0
            dist = abs(a_n - a_pre)
            hits.append(SuperAttractorHit(
                a=float(a_n), k=k, period=k,
                orbit=[float(x) for x in orb_mp],
                residual=float(abs(_mp_xi(a_n, k, s))),
                a_str=mp.nstr(a_n, 40),
                dist_to_pre=float(dist),
                m_shadow=m_shadow, rho=k - m_shadow))
            prev_k = k
            w = dist / shrink
        return hits
    finally:
        mp.dps = old_dps


def hits_csv(hits):
    """CSV export of search hits: a, k, period, type, residual."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["a", "k", "period", "type", "residual"])
    for h in hits:
        if isinstance(h, PreperiodicHit):
            w.writerow([format(h.a, ".17g"), h.k, 2, "preperiodic",
                        format(h.residual, ".17g")])
        else:
            w.writerow([format(h.a, ".17g"), h.k, h.period, "super-attractor",
                        format(h.residual, ".17g")])
    return buf.getvalue()
