"""Critical-orbit bookkeeping.

The two critical orbits of f_a are

    xi_k(a) = f_a^(k-1)(-+1),      k = 1, 2, ...

(side +1 starts at -1, the image of the critical point from the right;
side -1 starts at +1).  Along them we track the derivative cocycle
D_j(a) = (f_a^j)'(-+1) via the chain rule and the parameter derivative
d xi_k / da via the forward recursion

    d xi_{k+1}/da = f_a'(xi_k) * d xi_k/da + (df/da)(xi_k),  d xi_1/da = 0.
"""

import io
import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from rovella.family import DEFAULT_PARAMS, bisect

__all__ = [
    "CriticalOrbit",
    "GrowthReport",
    "critical_orbit",
    "orbit_array",
    "check_growth",
    "check_basic_assumption",
    "comparability",
    "outside_expansion",
    "find_initial_interval",
]

ORBIT_FLOOR = 1e-300  # |xi| below this would underflow the cocycle


@dataclass
class CriticalOrbit:
    side: int
    a: float
    xi: np.ndarray       # xi_1 .. xi_n
    D: np.ndarray        # D_1 .. D_n
    dxi_da: np.ndarray   # d xi_1/da .. d xi_n/da
    truncated_at: Optional[int] = None

    def __len__(self):
        return len(self.xi)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "xi", "D", "dxi_da"])
        for j in range(len(self.xi)):
            w.writerow([j + 1, format(self.xi[j], ".17g"),
                        format(self.D[j], ".17g"),
                        format(self.dxi_da[j], ".17g")])
        return buf.getvalue()


def critical_orbit(a, n, side=1, params=DEFAULT_PARAMS):
    """Critical orbit, cocycle and parameter derivative to depth n."""
    if n < 1:
        raise ValueError("depth must be at least 1")
    s = params.s
    two_a = 2.0 - a
    xi = np.empty(n)
    D = np.empty(n)
    dxi = np.empty(n)
    x = -1.0 * side
    dx = 0.0
    truncated = None
    Dacc = 1.0
    for k in range(n):
        xi[k] = x
        dxi[k] = dx
        ax = abs(x)
        if ax < ORBIT_FLOOR:
            truncated = k + 1
            fprime = 0.0
        else:
            fprime = two_a * s * ax ** (s - 1.0)
        Dacc *= fprime
        D[k] = Dacc
        if k + 1 < n:
            if truncated is not None:
                xi[k + 1:] = 0.0
                dxi[k + 1:] = 0.0
                D[k + 1:] = 0.0
                break
            sgn = 1.0 if x > 0 else (-1.0 if x < 0 else 1.0)
            nxt = sgn * (two_a * ax ** s - 1.0) if ax > 0 else -1.0
            dx = fprime * dx + (-sgn * ax ** s)
            x = nxt
    return CriticalOrbit(side=side, a=a, xi=xi, D=D, dxi_da=dxi,
                         truncated_at=truncated)


def orbit_array(avals, n, side=1, params=DEFAULT_PARAMS, want_deriv=False):
    """xi_n and optionally d xi_n/da for an array of parameters at once.

    Vectorized over the parameter; returns arrays of shape (n, len(avals)).
    """
    avals = np.asarray(avals, dtype=float)
    s = params.s
    two_a = 2.0 - avals
    xi = np.empty((n, len(avals)))
    x = np.full(len(avals), -1.0 * side)
    dx = np.zeros(len(avals)) if want_deriv else None
    dxi = np.empty((n, len(avals))) if want_deriv else None
    for k in range(n):
        xi[k] = x
        if want_deriv:
            dxi[k] = dx
        if k + 1 < n:
            ax = np.abs(x)
            sgn = np.where(x >= 0, 1.0, -1.0)
            if want_deriv:
                fprime = two_a * s * ax ** (s - 1.0)
                dx = fprime * dx - sgn * ax ** s
            x = np.where(ax > 0, sgn * (two_a * ax ** s - 1.0), -1.0)
    return (xi, dxi) if want_deriv else xi


@dataclass
class GrowthReport:
    passes_EG: bool
    lambda_used: float
    first_failure: Optional[int]
    passes_BA: bool
    alpha_used: float
    min_margin: float
    partial: bool = False


def check_growth(orbit, lam, eta=None, N=0):
    """Exponential growth of the cocycle: D_j >= lam^j for all j.

    If an early rate eta and a horizon N are given, additionally require
    D_j >= eta^j for j <= N.
    """
    n = len(orbit)
    partial = orbit.truncated_at is not None
    limit = (orbit.truncated_at - 1) if partial else n
    passes = True
    first_failure = None
    for j in range(1, limit + 1):
        need = lam ** j
        if eta is not None and j <= N:
            need = max(need, eta ** j)
        if orbit.D[j - 1] < need:
            passes = False
            first_failure = j
            break
    return GrowthReport(passes_EG=passes, lambda_used=lam,
                        first_failure=first_failure, passes_BA=True,
                        alpha_used=np.nan, min_margin=np.nan, partial=partial)


def check_basic_assumption(orbit, alpha):
    """Slow recurrence: |xi_j| >= e^(-alpha j) for all computed j."""
    n = len(orbit)
    limit = (orbit.truncated_at - 1) if orbit.truncated_at is not None else n
    min_margin = np.inf
    passes = True
    first_failure = None
    for j in range(1, limit + 1):
        ax = abs(orbit.xi[j - 1])
        if ax == 0.0:
            margin = -np.inf
        else:
            margin = np.log(ax) + alpha * j
        if margin < min_margin:
            min_margin = margin
        if margin < 0 and passes:
            passes = False
            first_failure = j
    if orbit.truncated_at is not None:
        passes = False
        if first_failure is None:
            first_failure = orbit.truncated_at
        min_margin = -np.inf
    return GrowthReport(passes_EG=True, lambda_used=np.nan,
                        first_failure=first_failure, passes_BA=passes,
                        alpha_used=alpha, min_margin=float(min_margin),
                        partial=orbit.truncated_at is not None)


def comparability(a, n, side=1, params=DEFAULT_PARAMS):
    """Ratio |d xi_n/da| / D_{n-1} of parameter to space derivatives."""
    if n == 1:
        return 0.0
    orb = critical_orbit(a, n, side=side, params=params)
    Dprev = orb.D[n - 2]
    if Dprev == 0.0:
        raise ValueError("derivative vanished (slow recurrence violated)")
    return abs(orb.dxi_da[n - 1]) / Dprev


def outside_expansion(a, x, n, Delta, params=DEFAULT_PARAMS):
    """Derivative of f_a^n at x for an orbit staying outside U_Delta.

    Returns (derivative, item) where item classifies the endpoint:
    1 = generic, 2 = landed in U_Delta, 3 = landed in U_1.  Raises if
    an intermediate iterate enters U_Delta.
    """
    from rovella.family import map_value, map_deriv

    cutoff = np.exp(-Delta)
    deriv = 1.0
    pt = x
    for i in range(n):
        if abs(pt) < cutoff:
            raise ValueError(f"orbit enters U_Delta at step {i}")
        deriv *= map_deriv(a, pt, params)
        pt = map_value(a, pt, params)
    if abs(pt) < cutoff:
        item = 2
    elif abs(pt) < np.exp(-1.0):
        item = 3
    else:
        item = 1
    return deriv, item


def find_initial_interval(Delta, params=DEFAULT_PARAMS, margin=1.5,
                          N_max=40, grid=512):
    """Initial parameter interval [0, a0] and expansion horizon N1.

    Finds the first N1 such that the image xi_N1([0, a0]) covers the
    critical neighbourhood U_Delta with the given margin while all
    earlier images stay clear of U_Delta.  The right endpoint a0 is
    located by monotone inversion (bisection) of a -> xi_N1(a).
    """
    target = margin * np.exp(-Delta)
    cutoff = np.exp(-Delta)
    for N1 in range(2, N_max + 1):
        avals = np.linspace(0.0, params.a_max, grid)
        xi = orbit_array(avals, N1, side=1, params=params)
        # largest prefix of the parameter grid whose earlier iterates
        # stay outside U_Delta
        clear = np.all(np.abs(xi[: N1 - 1]) >= cutoff, axis=0)
        if not clear[0]:
            continue
        bad = np.nonzero(~clear)[0]
        hi = params.a_max if len(bad) == 0 else avals[bad[0] - 1]
        # does xi_N1 reach the covering target on [0, hi]?
        def last_val(a):
            orb = critical_orbit(a, N1, side=1, params=params)
            return orb.xi[N1 - 1]
        if last_val(0.0) > -cutoff:
            continue
        if last_val(hi) < target:
            continue
        a0 = bisect(lambda a: last_val(a) - target, 0.0, hi, tol=1e-14)
        # confirm clearance on the located interval
        check = orbit_array(np.linspace(0.0, a0, grid), N1, side=1,
                            params=params)
        if not np.all(np.abs(check[: N1 - 1]) >= cutoff):
            continue
        return a0, N1
    raise ValueError("no initial interval found; try a larger Delta or a_max")
