"""Suspension-semiflow model over the Poincare map.

The three-dimensional flow is modeled by its return map to the section
z = 1 together with a roof function.  A passage starting at section
point (x, y) follows the linearized flow

    (x e^(lambda1 t), y e^(lambda2 t), e^(lambda3 t)),

leaves the unit cube when |x e^(lambda1 t)| = 1, and reinjects into the
section after a fixed extra time tau0; the roof is therefore

    tau(x) = tau0 + (1/lambda1) * ln(1/|x|),

diverging at the critical line x = 0.  A section orbit hitting x = 0
enters the stable manifold of the singularity: the trajectory converges
to the origin and time averages are continued along that terminal leg.
"""

import io
import csv
import math
from dataclasses import dataclass, field

import numpy as np

from rovella.family import DEFAULT_PARAMS, map_value
from rovella.measures import ZERO_SNAP

__all__ = [
    "FlowParams",
    "SectionPoint",
    "FlowAverage",
    "OBSERVABLES_3D",
    "poincare",
    "roof",
    "flow_average",
    "leaf_contraction",
]

QUAD_NODES = 128
PANEL_TIME = 10.0   # passages longer than this are split into panels


@dataclass(frozen=True)
class FlowParams:
    """Eigenvalues at the singularity and section-map coefficients.

    The contracting eigenvalue conditions 0 < lambda1 < -lambda3 <
    -lambda2 and lambda1 + lambda3 < 0 are enforced, as are r > s + 3
    and the match between s = -lambda3/lambda1 and the map family's
    critical exponent.
    """

    lambda1: float = 1.0
    lambda2: float = -5.0
    lambda3: float = -1.5
    tau0: float = 1.0
    c_g: float = 0.5
    rho_g: float = 0.25
    s: float = field(init=False)
    r: float = field(init=False)

    def __post_init__(self):
        if not (0 < self.lambda1 < -self.lambda3 < -self.lambda2):
            raise ValueError("need 0 < lambda1 < -lambda3 < -lambda2")
        if not self.lambda1 + self.lambda3 < 0:
            raise ValueError("contracting condition lambda1 + lambda3 < 0")
        object.__setattr__(self, "s", -self.lambda3 / self.lambda1)
        object.__setattr__(self, "r", -self.lambda2 / self.lambda1)
        if not self.r > self.s + 3:
            raise ValueError("need r > s + 3")
        if not 0 < self.rho_g < 1:
            raise ValueError("rho_g must lie in (0, 1)")
        if not self.tau0 > 0:
            raise ValueError("tau0 must be positive")


DEFAULT_FLOW = FlowParams()


@dataclass(frozen=True)
class SectionPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (-1.0 <= self.x <= 1.0 and -1.0 <= self.y <= 1.0):
            raise ValueError("section point outside the square")


def poincare(a, p, params=DEFAULT_PARAMS, flow=DEFAULT_FLOW):
    """Return map P_a(x, y) = (f_a(x), sgn(x) c_g + rho_g y |x|^r).

    The y-component contracts by rho_g |x|^r <= rho_g < 1, so the
    section map has uniformly contracting vertical leaves.  The critical
    line x = 0 maps to the single point (-1, c_g) (sign convention
    sgn(0) := +1).
    """
    sgn = 1.0 if p.x >= 0 else -1.0
    x1 = map_value(a, p.x, params)
    y1 = sgn * flow.c_g + flow.rho_g * p.y * abs(p.x) ** flow.r
    return SectionPoint(x=float(x1), y=float(y1))


def roof(x, flow=DEFAULT_FLOW):
    """Passage time tau(x) = tau0 + (1/lambda1) ln(1/|x|); infinite at 0."""
    if x == 0.0:
        return math.inf
    return flow.tau0 + math.log(1.0 / abs(x)) / flow.lambda1


def _position(p, t, flow):
    """Linear-passage position at time t into the cube leg from (x, y, 1)."""
    return (p.x * np.exp(flow.lambda1 * t),
            p.y * np.exp(flow.lambda2 * t),
            np.exp(flow.lambda3 * t))


def _dist_capped(pos):
    x, y, z = pos
    return np.minimum(np.sqrt(x * x + y * y + z * z), 1.0)


OBSERVABLES_3D = {
    "dist_to_origin_capped": _dist_capped,
    "x": lambda pos: pos[0],
    "y": lambda pos: pos[1],
    "z": lambda pos: pos[2],
    "constant": lambda pos: np.ones_like(np.asarray(pos[2])),
}


@dataclass
class FlowAverage:
    average: float
    dwell: float
    T: float
    terminal: bool
    visits: list            # completed passage durations tau(x_i)
    series: list            # (t, value_so_far, dwell_so_far) checkpoints

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "value", "dwell"])
        for t, v, d in self.series:
            w.writerow([format(t, ".17g"), format(v, ".17g"),
                        format(d, ".17g")])
        return buf.getvalue()


def _leg_integrals(phi, posfun, t_len, flow):
    """Quadrature of phi and of the near-origin indicator over one leg.

    128-node Gauss-Legendre per panel; legs longer than PANEL_TIME are
    split so the nodes resolve the exponential profiles.
    """
    nodes, weights = np.polynomial.legendre.leggauss(QUAD_NODES)
    n_panels = max(1, int(math.ceil(t_len / PANEL_TIME)))
    total = 0.0
    near = 0.0
    for i in range(n_panels):
        t0 = t_len * i / n_panels
        t1 = t_len * (i + 1) / n_panels
        tm = 0.5 * (t0 + t1)
        th = 0.5 * (t1 - t0)
        ts = tm + th * nodes
        pos = posfun(ts)
        total += th * float(np.sum(weights * phi(pos)))
        x, y, z = pos
        dist = np.sqrt(x * x + y * y + z * z)
        near += th * float(np.sum(weights * (dist < 0.1)))
    return total, near


def flow_average(a, p0, observable="dist_to_origin_capped", T=1e4,
                 params=DEFAULT_PARAMS, flow=DEFAULT_FLOW,
                 checkpoints=64, snap=ZERO_SNAP):
    """Time average of an observable along the suspension trajectory.

    Accumulates exact-quadrature integrals passage by passage until the
    horizon T.  Each passage contributes a cube leg of length
    (1/lambda1) ln(1/|x|) plus a reinjection leg of length tau0 with
    the observable frozen at the exit value.  If the section orbit hits
    the critical line the average is continued along the terminal leg
    converging to the origin and the result is flagged terminal.
    """
    if T <= 0:
        raise ValueError("horizon must be positive")
    phi = OBSERVABLES_3D[observable] if isinstance(observable, str) \
        else observable
    p = p0 if isinstance(p0, SectionPoint) else SectionPoint(*p0)
    t_acc = 0.0
    int_acc = 0.0
    near_acc = 0.0
    visits = []
    series = []
    next_cp = T / checkpoints
    terminal = False
    while t_acc < T:
        if p.x == 0.0:
            # stable-manifold leg: the trajectory converges to the
            # origin, position (0, y e^(lambda2 t), e^(lambda3 t))
            terminal = True
            leg_start = t_acc
            # integrate checkpoint segment by checkpoint segment so the
            # emitted series keeps its resolution on the infinite roof
            while t_acc < T:
                t_stop = min(next_cp, T)
                if t_stop <= t_acc:
                    t_stop = T

                def posfun_seg(ts, pp=p, off=t_acc - leg_start):
                    return (np.zeros_like(ts),
                            pp.y * np.exp(flow.lambda2 * (off + ts)),
                            np.exp(flow.lambda3 * (off + ts)))

                val, near = _leg_integrals(phi, posfun_seg,
                                           t_stop - t_acc, flow)
                int_acc += val
                near_acc += near
                t_acc = t_stop
                while t_acc >= next_cp - 1e-12 and next_cp <= T:
                    series.append((next_cp, int_acc / t_acc,
                                   near_acc / t_acc))
                    next_cp += T / checkpoints
            break
        tau_loc = math.log(1.0 / abs(p.x)) / flow.lambda1
        tau_full = tau_loc + flow.tau0
        t_len = min(tau_full, T - t_acc)
        cube_len = min(tau_loc, t_len)
        if cube_len > 0:
            val, near = _leg_integrals(
                phi, lambda ts, pp=p: _position(pp, ts, flow),
                cube_len, flow)
            int_acc += val
            near_acc += near
        rein_len = t_len - cube_len
        if rein_len > 0:
            # observable frozen at the exit point of the cube
            exit_pos = tuple(np.asarray(c)
                             for c in _position(p, tau_loc, flow))
            fval = float(phi(exit_pos))
            int_acc += fval * rein_len
            dist = math.sqrt(sum(float(c) ** 2 for c in exit_pos))
            near_acc += rein_len * (dist < 0.1)
        t_acc += t_len
        if t_len == tau_full:
            visits.append(tau_full)
        while t_acc >= next_cp - 1e-12 and next_cp <= T:
            series.append((next_cp, int_acc / t_acc, near_acc / t_acc))
            next_cp += T / checkpoints
        q = poincare(a, p, params, flow)
        x1 = 0.0 if abs(q.x) < snap else q.x
        p = SectionPoint(x=x1, y=q.y)
    avg = int_acc / T
    dwell = near_acc / T
    if not series or series[-1][0] < T:
        series.append((T, avg, dwell))
    return FlowAverage(average=avg, dwell=dwell, T=T, terminal=terminal,
                       visits=visits, series=series)


def leaf_contraction(a, p, q, n, params=DEFAULT_PARAMS, flow=DEFAULT_FLOW):
    """Distances of two section points on the same vertical leaf under
    iteration of the return map; contracts by at least rho_g per step."""
    if p.x != q.x:
        raise ValueError("points must lie on the same vertical leaf")
    dists = [abs(p.y - q.y)]
    for _ in range(n):
        p = poincare(a, p, params, flow)
        q = poincare(a, q, params, flow)
        dists.append(abs(p.y - q.y))
    return dists
