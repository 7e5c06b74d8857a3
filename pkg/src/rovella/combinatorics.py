"""Symbolic skeleton of the parameter-exclusion argument.

Three ingredients live here:

* derivation of the coupled constants (rates, exponents, horizons) with
  their consistency inequalities;
* the partition of the critical neighbourhood into levels
  I_m = [e^-(m+1), e^-m) split into m^2 equal cells I_{m,k};
* bound periods and the decomposition of a critical orbit into returns,
  bound periods and free periods, with the free-time and deviation
  statistics.
"""

import io
import csv
import math
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from rovella.family import DEFAULT_PARAMS, map_value
from rovella.orbit import critical_orbit

__all__ = [
    "ConstantsBundle",
    "IntervalAddress",
    "Itinerary",
    "Segment",
    "derive_constants",
    "level_bounds",
    "cell_bounds",
    "cell_plus_bounds",
    "locate",
    "bound_period",
    "bound_period_interval",
    "itinerary",
]


@dataclass
class ConstantsBundle:
    """All induction constants and their derived quantities."""

    s: float
    Delta: int
    alpha: float
    beta: float
    lambda0: float
    delta: float = field(init=False)
    c_prime: float = field(init=False)
    lam: float = field(init=False)
    kappa1: float = field(init=False)
    kappa2: float = field(init=False)
    kappa: float = field(init=False)
    A: float = 10.0          # comparability constant (calibrated)
    eta1: float = 2.5        # early growth rate, > 2
    N: int = 5               # early growth horizon
    N0: int = 5
    N1: Optional[int] = None
    a0: Optional[float] = None
    c: float = 1.0           # outside-expansion constants (calibrated)
    lambda_c: Optional[float] = None

    def __post_init__(self):
        self.delta = math.exp(-self.Delta)
        log_l0 = math.log(self.lambda0)
        self.c_prime = 1.0 - (2.0 * self.alpha
                              + (self.s - 1.0) * self.alpha / log_l0)
        self.lam = self.lambda0 ** self.c_prime
        log_l = math.log(self.lam)
        self.kappa1 = self.beta * (self.s + 2.0) / (self.beta + log_l)
        self.kappa2 = self.beta * (self.s + 3.0) / (self.beta + log_l)
        self.kappa = self.beta * (self.s + 5.0) / (self.beta + log_l)
        if self.lambda_c is None:
            self.lambda_c = self.lambda0

    def constraint_failures(self):
        """Names of violated consistency inequalities (empty if valid)."""
        fails = []
        if not self.s > 1:
            fails.append("s > 1")
        if self.Delta < 2:
            fails.append("Delta >= 2")
        if not (self.alpha > 0 and self.beta > 0):
            fails.append("alpha, beta > 0")
        if not self.lambda0 > 1:
            fails.append("lambda0 > 1")
        if fails:
            return fails
        if not self.c_prime > 0:
            fails.append("c_prime > 0")
        if not self.lam > 1:
            fails.append("lambda = lambda0^c_prime > 1")
        if not self.alpha * self.s < math.log(self.lam):
            fails.append("alpha*s < log(lambda)")
        if not self.s * self.alpha <= self.beta:
            fails.append("s*alpha <= beta")
        if not self.kappa < 1:
            fails.append("beta*(s+5)/(beta+log lambda) < 1")
        if not self.kappa1 < self.kappa2 < self.kappa:
            fails.append("kappa1 < kappa2 < kappa")
        return fails

    def bound_period_cap(self, m):
        """Upper bound (s+1)|m| / (beta + log lambda) for bound periods."""
        return (self.s + 1.0) * abs(m) / (self.beta + math.log(self.lam))

    def to_dict(self):
        return asdict(self)


def derive_constants(s=1.5, Delta=3, alpha=0.03, beta=0.05, lambda0=1.5,
                     **extra):
    """Build and validate the constants bundle."""
    bundle = ConstantsBundle(s=s, Delta=Delta, alpha=alpha, beta=beta,
                             lambda0=lambda0, **extra)
    fails = bundle.constraint_failures()
    if fails:
        raise ValueError("constants violate: " + "; ".join(fails))
    return bundle


# ---------------------------------------------------------------------------
# partition of the critical neighbourhood


def level_bounds(m):
    """I_m as (lo, hi); for m > 0 this is [e^-(m+1), e^-m), mirrored for m<0."""
    am = abs(m)
    lo, hi = math.exp(-(am + 1)), math.exp(-am)
    if m < 0:
        return -hi, -lo
    return lo, hi


def cell_bounds(m, k):
    """Cell I_{m,k}: the k-th of m^2 equal pieces of I_m, counted from
    the outer edge e^-|m| inward."""
    am = abs(m)
    if not 1 <= k <= am * am:
        raise ValueError("cell index out of range")
    hi = math.exp(-am)
    width = (math.exp(-am) - math.exp(-(am + 1))) / (am * am)
    lo_k = hi - k * width
    hi_k = hi - (k - 1) * width
    if m < 0:
        return -hi_k, -lo_k
    return lo_k, hi_k


def cell_plus_bounds(m, k, Delta):
    """Extended cell I_{m,k}^+ (cell plus its two adjacent subintervals).

    The extension crosses level boundaries for the first and last cell
    of a level.  The innermost cell of level Delta-1 is special: it is
    the escape cell and its extension is the whole half-interval.
    """
    am = abs(m)
    if am == Delta - 1 and k == am * am:
        return (-1.0, 0.0) if m < 0 else (0.0, 1.0)
    width = (math.exp(-am) - math.exp(-(am + 1))) / (am * am)
    lo, hi = cell_bounds(abs(m), k)
    if k == 1:
        # outer neighbour sits in level |m|-1
        if am - 1 >= 1:
            wout = (math.exp(-(am - 1)) - math.exp(-am)) / ((am - 1) ** 2)
        else:
            wout = width
        lo2, hi2 = lo - width, hi + wout
    elif k == am * am:
        # inner neighbour sits in level |m|+1
        win = (math.exp(-(am + 1)) - math.exp(-(am + 2))) / ((am + 1) ** 2)
        lo2, hi2 = lo - win, hi + width
    else:
        lo2, hi2 = lo - width, hi + width
    if m < 0:
        return -hi2, -lo2
    return lo2, hi2


@dataclass(frozen=True)
class IntervalAddress:
    m: int
    k: int
    bounds: tuple
    plus_bounds: tuple


OUTSIDE = "outside"
CRITICAL = "critical"


def locate(x, bundle):
    """Partition address of x, or a marker when x is outside the
    partitioned zone (levels |m| >= Delta-1) or at the critical point."""
    if x == 0.0:
        return CRITICAL
    ax = abs(x)
    if ax >= math.exp(-(bundle.Delta - 1)):
        return OUTSIDE
    m = int(math.floor(-math.log(ax)))
    # boundary points belong to the left-closed level [e^-(m+1), e^-m)
    if ax < math.exp(-(m + 1)):
        m += 1
    elif ax >= math.exp(-m):
        m -= 1
    width = (math.exp(-m) - math.exp(-(m + 1))) / (m * m)
    k = int(math.floor((math.exp(-m) - ax) / width)) + 1
    k = min(max(k, 1), m * m)
    lo, hi = cell_bounds(m, k)
    # nudge across the cell boundary if floor landed on the wrong side
    if ax < lo and k < m * m:
        k += 1
    elif ax >= hi and k > 1:
        k -= 1
    signed_m = m if x > 0 else -m
    lo, hi = cell_bounds(signed_m, k)
    return IntervalAddress(m=signed_m, k=k, bounds=(lo, hi),
                           plus_bounds=cell_plus_bounds(signed_m, k,
                                                        bundle.Delta))


# ---------------------------------------------------------------------------
# bound periods


def bound_period(a, m, x, bundle, params=DEFAULT_PARAMS, with_trace=False):
    """Bound period of a return point x at level m.

    Largest p such that |f_a^j(x) - xi_j(a)| <= e^(-beta j) for all
    j = 1..p, where xi is the critical orbit on the side matching the
    sign of m (a point just right of 0 is flung next to -1 and shadows
    the orbit of -1).
    """
    side = 1 if m > 0 else -1
    depth = int(math.ceil(bundle.bound_period_cap(m))) + 30
    orb = critical_orbit(a, depth, side=side, params=params)
    pt = x
    p = 0
    trace = []
    for j in range(1, depth + 1):
        pt = map_value(a, pt, params)
        gap = abs(pt - orb.xi[j - 1])
        trace.append(gap)
        if gap <= math.exp(-bundle.beta * j):
            p = j
        else:
            break
    else:
        raise ValueError("insufficient orbit depth to resolve bound period")
    return (p, trace) if with_trace else p


def bound_period_interval(lo, hi, m, bundle, params=DEFAULT_PARAMS,
                          samples=9, points=None):
    """Bound period of a parameter interval: minimum over a sample grid.

    If `points` is given it must map each sampled parameter to the
    return point to bind from; otherwise the critical orbit value is
    recomputed per sample (the return is a critical return).
    """
    avals = np.linspace(lo, hi, samples)
    best = None
    for a in avals:
        x = points(a) if points is not None else None
        if x is None:
            raise ValueError("bound_period_interval needs return points")
        p = bound_period(a, m, x, bundle, params=params)
        best = p if best is None else min(best, p)
    return best


# ---------------------------------------------------------------------------
# itineraries


@dataclass
class Segment:
    kind: str          # "return" | "bound" | "free"
    start: int
    length: int
    m: int = 0
    k: int = 0
    p: int = 0


@dataclass
class Itinerary:
    a: float
    n: int
    segments: list
    F_n: int
    T_n: int
    truncated: bool
    passes_FA: bool

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["start", "length", "kind", "m", "k", "p"])
        for seg in self.segments:
            w.writerow([seg.start, seg.length, seg.kind, seg.m, seg.k, seg.p])
        return buf.getvalue()


def itinerary(a, n, bundle, params=DEFAULT_PARAMS, side=1):
    """Decompose the critical orbit of f_a into returns, bound periods
    and free periods up to time n.

    A return is a visit of xi_j to U_{Delta-1} outside an active bound
    period (visits during a bound period are invisible).  The free time
    F_n counts iterates in free periods; the deviation statistic T_n
    counts iterates inside return-plus-bound blocks anchored at deep
    returns (level |m| >= Delta; blocks anchored at the escape level
    |m| = Delta-1 do not contribute).
    """
    depth = n + 1
    orb = critical_orbit(a, depth, side=side, params=params)
    zone = math.exp(-(bundle.Delta - 1))
    segments = []
    F = 0
    T = 0
    truncated = False
    bound_until = 0
    free_run = 0
    j = 1
    while j <= n:
        x = orb.xi[j - 1]
        if x == 0.0:
            truncated = True
            break
        if j <= bound_until:
            j += 1
            continue
        if abs(x) < zone:
            if free_run:
                segments.append(Segment("free", j - free_run, free_run))
                F += free_run
                free_run = 0
            addr = locate(x, bundle)
            m, k = addr.m, addr.k
            try:
                p = bound_period(a, m, x, bundle, params=params)
            except ValueError:
                # binding never releases (orbit with a collapsing
                # cocycle); treat like a truncated orbit
                truncated = True
                break
            p_used = min(p, n - j)
            segments.append(Segment("return", j, 1, m=m, k=k, p=p))
            if p_used > 0:
                segments.append(Segment("bound", j + 1, p_used, m=m, k=k, p=p))
            if abs(m) >= bundle.Delta:
                T += 1 + p_used
            bound_until = j + p_used
        else:
            free_run += 1
        j += 1
    if free_run:
        segments.append(Segment("free", j - free_run, free_run))
        F += free_run
    horizon = (j - 1) if truncated else n
    passes_FA = (not truncated) and F >= (1.0 - bundle.alpha) * n
    return Itinerary(a=a, n=horizon, segments=segments, F_n=F, T_n=T,
                     truncated=truncated, passes_FA=passes_FA)
