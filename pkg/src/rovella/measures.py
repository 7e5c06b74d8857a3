"""Empirical invariant measures and Wasserstein comparison.

A measure on [-1, 1] is represented as a histogram over uniform bins
plus an optional list of atoms.  Orbits attracted to a periodic cycle
collapse the histogram onto atoms; the L1 distance between cumulative
distribution functions gives the exact Wasserstein-1 distance between
two such measures.
"""

import io
import csv
from dataclasses import dataclass, field

import numpy as np

from rovella.family import DEFAULT_PARAMS, map_value

__all__ = [
    "EmpiricalMeasure",
    "OBSERVABLES",
    "empirical_measure",
    "measure_from_atoms",
    "birkhoff_average",
    "wasserstein1",
    "instability_table",
]

DEFAULT_BINS = 2000
DEFAULT_BURN = 10_000
DEFAULT_ITER = 1_000_000
PERIODIC_TOL = 1e-10
# orbit points this close to the critical point are snapped onto it, so
# that a super-attracting cycle closes exactly through f(0) = -1 instead
# of alternating through +-1 ulp (an exact floating zero of the orbit
# need not exist: the rounding grid of the map can skip 0.0)
ZERO_SNAP = 1e-13


def iterate_snapped(a, x, params=DEFAULT_PARAMS, snap=ZERO_SNAP):
    """One map step with the near-critical snap applied."""
    x = map_value(a, x, params)
    return 0.0 if abs(x) < snap else x


@dataclass
class EmpiricalMeasure:
    """Probability measure on [-1, 1]: histogram weights plus atoms.

    edges    : bin edges, uniform over [-1, 1] (len = bins + 1);
    weights  : mass per bin (sums with the atoms to 1);
    atoms    : list of (position, mass) pairs.
    """

    edges: np.ndarray
    weights: np.ndarray
    atoms: list = field(default_factory=list)

    @property
    def total_mass(self):
        return float(np.sum(self.weights) + sum(m for _, m in self.atoms))

    def cdf_on(self, grid):
        """CDF evaluated at the given sorted grid points."""
        vals = np.zeros(len(grid))
        if np.any(self.weights):
            cum = np.concatenate([[0.0], np.cumsum(self.weights)])
            vals += np.interp(grid, self.edges, cum)
        for pos, mass in self.atoms:
            vals += mass * (grid >= pos)
        return vals

    def mean(self, observable):
        phi = OBSERVABLES[observable] if isinstance(observable, str) \
            else observable
        centers = 0.5 * (self.edges[:-1] + self.edges[1:])
        out = float(np.sum(self.weights * phi(centers)))
        out += sum(mass * float(phi(np.asarray(pos)))
                   for pos, mass in self.atoms)
        return out


def _make_edges(bins):
    return np.linspace(-1.0, 1.0, bins + 1)


def measure_from_atoms(atoms, bins=DEFAULT_BINS):
    """Purely atomic measure from (position, mass) pairs."""
    total = sum(m for _, m in atoms)
    if abs(total - 1.0) > 1e-12:
        raise ValueError("atom masses must sum to 1")
    return EmpiricalMeasure(edges=_make_edges(bins),
                            weights=np.zeros(bins),
                            atoms=sorted(atoms))


def empirical_measure(a, x0=None, params=DEFAULT_PARAMS, bins=DEFAULT_BINS,
                      burn=DEFAULT_BURN, n=DEFAULT_ITER,
                      periodic_tol=PERIODIC_TOL, period_cap=512):
    """Empirical measure of the orbit of x0 under f_a.

    Burns in, then either detects convergence to a periodic cycle
    (successive near-repeats within periodic_tol) and returns equal
    atoms on the cycle, or histograms n iterates.
    """
    if x0 is None:
        x0 = -1.0
    x = float(x0)
    tail = []
    for _ in range(burn):
        x = iterate_snapped(a, x, params)
        tail.append(x)
        if len(tail) > 2 * period_cap:
            tail.pop(0)
    # periodic detection on the burn-in tail
    if len(tail) >= 2 * period_cap:
        recent = tail[-period_cap:]
        for p in range(1, period_cap // 2 + 1):
            if all(abs(recent[i] - recent[i + p]) <= periodic_tol
                   for i in range(period_cap - p)):
                cycle = recent[-p:]
                atoms = [(float(c), 1.0 / p) for c in cycle]
                return measure_from_atoms(atoms, bins=bins)
    edges = _make_edges(bins)
    counts = np.zeros(bins)
    block = np.empty(4096)
    done = 0
    while done < n:
        take = min(len(block), n - done)
        for i in range(take):
            x = iterate_snapped(a, x, params)
            block[i] = x
        h, _ = np.histogram(block[:take], bins=edges)
        counts += h
        done += take
    weights = counts / float(n)
    return EmpiricalMeasure(edges=edges, weights=weights, atoms=[])


def birkhoff_average(a, observable, x0=-1.0, n=DEFAULT_ITER,
                     params=DEFAULT_PARAMS):
    """Time average (1/n) sum phi(f^i(x0)) of an observable."""
    phi = OBSERVABLES[observable] if isinstance(observable, str) \
        else observable
    x = float(x0)
    total = 0.0
    for _ in range(n):
        total += float(phi(np.asarray(x)))
        x = iterate_snapped(a, x, params)
    return total / n


def wasserstein1(mu, nu):
    """Exact Wasserstein-1 distance: the L1 norm of the CDF difference.

    Both measures must be normalized; histograms contribute piecewise
    linear CDFs, atoms contribute jumps, and the integral of the
    absolute difference is computed exactly on the merged breakpoints.
    """
    for m in (mu, nu):
        if abs(m.total_mass - 1.0) > 1e-9:
            raise ValueError("measures must be normalized to mass 1")
    pts = set(mu.edges.tolist()) | set(nu.edges.tolist())
    pts |= {p for p, _ in mu.atoms} | {p for p, _ in nu.atoms}
    grid = np.array(sorted(pts))
    # the CDF difference is linear between adjacent breakpoints except
    # at atoms, where both one-sided values matter; evaluate right
    # limits at each breakpoint and left limits just before the next
    right = mu.cdf_on(grid) - nu.cdf_on(grid)

    def cdf_left(m, x):
        val = 0.0
        if np.any(m.weights):
            cum = np.concatenate([[0.0], np.cumsum(m.weights)])
            val += float(np.interp(x, m.edges, cum))
        for pos, mass in m.atoms:
            val += mass * (x > pos)
        return val

    total = 0.0
    for i in range(len(grid) - 1):
        x0, x1 = grid[i], grid[i + 1]
        d0 = right[i]
        d1 = cdf_left(mu, x1) - cdf_left(nu, x1)
        if d0 * d1 >= 0:
            total += 0.5 * abs(d0 + d1) * (x1 - x0)
        else:
            # sign change inside the segment: split at the zero
            t = abs(d0) / (abs(d0) + abs(d1))
            total += 0.5 * (abs(d0) * t + abs(d1) * (1 - t)) * (x1 - x0)
    return total


# ---------------------------------------------------------------------------
# observables


def _tent(x):
    return 1.0 - np.abs(x)


OBSERVABLES = {
    "identity": lambda x: x,
    "abs": lambda x: np.abs(x),
    "dist_to": lambda c: (lambda x: np.abs(x - c)),
    "indicator": lambda lo, hi: (lambda x: ((x >= lo) & (x < hi)) * 1.0),
    "tent": _tent,
}


# ---------------------------------------------------------------------------
# statistical instability table


def instability_table(hits, reference_a=0.0, params=DEFAULT_PARAMS,
                      bins=DEFAULT_BINS, ref_iter=200_000):
    """Wasserstein distances of super-attractor measures.

    For each hit the invariant measure is the uniform atomic measure on
    the super-attracting cycle.  The table compares it with the atomic
    pair measure on the period-2 orbit (weight 1/2 each) and with the
    empirical reference measure at reference_a.  Returns (rows, csv)
    where each row is (a, period, W1_to_atomic, W1_to_acim).
    """
    from rovella.search import period2

    ref = empirical_measure(reference_a, params=params, bins=bins,
                            n=ref_iter)
    rows = []
    for h in hits:
        orb2 = period2(h.a, params)
        pair = measure_from_atoms([(orb2.y_minus, 0.5), (orb2.y_plus, 0.5)],
                                  bins=bins)
        mu = measure_from_atoms([(float(x), 1.0 / h.period)
                                 for x in h.orbit], bins=bins)
        rows.append((h.a, h.period,
                     wasserstein1(mu, pair), wasserstein1(mu, ref)))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["a_n", "period", "W1_to_atomic", "W1_to_acim"])
    for a, p, w1, w2 in rows:
        w.writerow([format(a, ".17g"), p, format(w1, ".17g"),
                    format(w2, ".17g")])
    return rows, buf.getvalue()
