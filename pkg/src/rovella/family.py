"""Contracting Lorenz map family.

The one-dimensional family implemented here is

    f_a(x) = sgn(x) * ((2 - a) * |x|^s - 1),    x in [-1, 1], 0 <= a <= a_max,

with critical exponent s > 1.  It is odd in x, has one-sided limits
f_a(0+) = -1 and f_a(0-) = 1, fixed points at +-1 when a = 0, and
derivative f_a'(x) = (2 - a) * s * |x|^(s-1) vanishing at the critical
point.  By convention the critical point itself is sent to -1.
"""

from dataclasses import dataclass, asdict

import numpy as np

__all__ = [
    "FamilyParams",
    "MapJet",
    "AxiomReport",
    "map_eval",
    "map_value",
    "map_deriv",
    "map_zero",
    "verify_axioms",
    "bisect",
]

CRITICAL_IMAGE = -1.0  # convention: f_a(0) := -1 for every a


@dataclass(frozen=True)
class FamilyParams:
    """Analytic constants of the family.

    s      : critical exponent, s > 1.
    a_max  : upper bound of the parameter range.
    K0, K1 : derivative sandwich constants, K0 |x|^(s-1) <= f' <= K1 |x|^(s-1).
    chi    : upper bound for the Schwarzian derivative, chi < 0.
    """

    s: float = 1.5
    a_max: float = 0.4
    K0: float = None
    K1: float = None
    chi: float = None

    def __post_init__(self):
        if not self.s > 1:
            raise ValueError("critical exponent s must exceed 1")
        if not 0 < self.a_max < 1:
            raise ValueError("a_max must lie in (0, 1)")
        # exact values for the concrete formula
        if self.K0 is None:
            object.__setattr__(self, "K0", (2.0 - self.a_max) * self.s)
        if self.K1 is None:
            object.__setattr__(self, "K1", 2.0 * self.s)
        if self.chi is None:
            object.__setattr__(self, "chi", -(self.s ** 2 - 1.0) / 2.0)
        if not self.chi < 0:
            raise ValueError("Schwarzian bound chi must be negative")
        if not (self.K0 <= (2.0 - self.a_max) * self.s and self.K1 >= 2.0 * self.s):
            raise ValueError("K0/K1 do not sandwich the derivative on [0, a_max]")

    def to_kv(self):
        """Flat key-value text serialization."""
        d = asdict(self)
        return "".join(f"{k} = {d[k]!r}\n" for k in ("s", "a_max", "K0", "K1", "chi"))

    @classmethod
    def from_kv(cls, text):
        vals = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            k, _, v = line.partition("=")
            vals[k.strip()] = float(v)
        return cls(**vals)


DEFAULT_PARAMS = FamilyParams()


@dataclass(frozen=True)
class MapJet:
    """Value and derivatives of f_a at one point."""

    f: float
    df_dx: float
    d2f_dx2: float
    df_da: float
    schwarzian: float


def _check_range(a, params):
    if not 0.0 <= a <= params.a_max:
        raise ValueError(f"parameter a={a} outside [0, {params.a_max}]")


def map_value(a, x, params=DEFAULT_PARAMS):
    """f_a(x) for scalar or array x; the critical point goes to -1."""
    s = params.s
    ax = np.abs(x)
    val = np.sign(x) * ((2.0 - a) * ax ** s - 1.0)
    # one-sided convention at the critical point
    val = np.where(ax == 0.0, CRITICAL_IMAGE, val)
    return val if isinstance(x, np.ndarray) else float(val)


def map_deriv(a, x, params=DEFAULT_PARAMS):
    """f_a'(x) = (2 - a) s |x|^(s-1); vanishes at the critical point."""
    s = params.s
    return (2.0 - a) * s * np.abs(x) ** (s - 1.0)


def map_eval(a, x, params=DEFAULT_PARAMS, side=None):
    """Full jet of f_a at x.

    x = 0 needs an explicit one-sided convention: pass side=+1 or -1 to
    evaluate the limit from that side (value -+1, derivatives of the
    limit).  Without a side, x = 0 raises.
    """
    _check_range(a, params)
    s = params.s
    if x == 0.0:
        if side is None:
            raise ValueError("critical point requires side convention")
        sgn = 1.0 if side > 0 else -1.0
        return MapJet(f=-sgn, df_dx=0.0, d2f_dx2=0.0, df_da=0.0,
                      schwarzian=-np.inf)
    sgn = np.sign(x)
    ax = abs(x)
    f = sgn * ((2.0 - a) * ax ** s - 1.0)
    df_dx = (2.0 - a) * s * ax ** (s - 1.0)
    d2f_dx2 = sgn * (2.0 - a) * s * (s - 1.0) * ax ** (s - 2.0)
    df_da = -sgn * ax ** s
    # Sf = f'''/f' - (3/2)(f''/f')^2 = -(s^2 - 1) / (2 x^2)
    schwarzian = -(s ** 2 - 1.0) / (2.0 * x * x)
    return MapJet(f=float(f), df_dx=float(df_dx), d2f_dx2=float(d2f_dx2),
                  df_da=float(df_da), schwarzian=float(schwarzian))


def bisect(func, lo, hi, tol=1e-13, max_iter=200):
    """Root of a scalar function on a bracketing interval by bisection."""
    flo = func(lo)
    fhi = func(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise ValueError("bisection endpoints do not bracket a root")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid == lo or mid == hi:
            return mid
        fmid = func(mid)
        if fmid == 0.0:
            return mid
        if np.sign(fmid) == np.sign(flo):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    return 0.5 * (lo + hi)


def map_zero(a, side, params=DEFAULT_PARAMS):
    """Zero of f_a on the requested side of the critical point.

    Solves (2 - a) |x|^s = 1 by bisection; the positive zero lies in
    (0, 1), the negative one is its mirror image.
    """
    _check_range(a, params)
    root = bisect(lambda x: map_value(a, x, params), 1e-12, 1.0, tol=1e-15)
    return root if side > 0 else -root


@dataclass
class AxiomReport:
    """Grid verification of the family axioms.

    Each entry of `passed` / `margin` / `worst_at` is keyed by a short
    axiom label.  Margins are worst-case slack of the corresponding
    inequality over the grid (positive = satisfied strictly).
    """

    passed: dict
    margin: dict
    worst_at: dict

    @property
    def all_passed(self):
        return all(self.passed.values())


def verify_axioms(params=DEFAULT_PARAMS, n_x=10_000, n_a=20):
    """Check the family axioms on an (x, a) sample grid.

    Verified items: the a = 0 fixed points at +-1; the one-sided limits
    at the critical point; monotonicity and the convexity sign change;
    the derivative sandwich with constants K0, K1; the negative
    Schwarzian bound; parameter C^1-continuity (finite differences);
    unit speed of the critical values in a; and odd symmetry.
    """
    if n_x < 100 or n_a < 2:
        raise ValueError("grid needs at least 100 x-points and 2 a-points")
    s = params.s
    xs = np.linspace(-1.0, 1.0, n_x)
    xs = xs[xs != 0.0]
    avs = np.linspace(0.0, params.a_max, n_a)
    passed, margin, worst_at = {}, {}, {}

    def record(key, margins, locations, tol=0.0):
        # the floating-point tolerance is folded into the margin, so an
        # inequality met with exact equality still reports positive slack
        i = int(np.argmin(margins))
        passed[key] = bool(margins[i] + tol > 0)
        margin[key] = float(margins[i] + tol)
        worst_at[key] = locations[i]

    # fixed points of f_0 at +-1
    fp = -np.abs(np.array([map_value(0.0, 1.0, params) - 1.0,
                           map_value(0.0, -1.0, params) + 1.0]))
    record("fixed_points", fp, [(0.0, 1.0), (0.0, -1.0)], tol=1e-13)

    # one-sided limits at the critical point
    eps = 1e-9
    lim = []
    locs = []
    for a in avs:
        lim.append(-abs(map_value(a, eps, params) + 1.0) + 10 * eps)
        lim.append(-abs(map_value(a, -eps, params) - 1.0) + 10 * eps)
        locs.extend([(a, eps), (a, -eps)])
    record("one_sided_limits", np.array(lim), locs)

    mono_m, mono_loc = [], []
    conv_m, conv_loc = [], []
    dcmp_m, dcmp_loc = [], []
    schw_m, schw_loc = [], []
    symm_m, symm_loc = [], []
    for a in avs:
        vals = np.sign(xs) * ((2.0 - a) * np.abs(xs) ** s - 1.0)
        der = (2.0 - a) * s * np.abs(xs) ** (s - 1.0)
        der2 = np.sign(xs) * (2.0 - a) * s * (s - 1.0) * np.abs(xs) ** (s - 2.0)
        # f' > 0 away from the critical point
        i = int(np.argmin(der))
        mono_m.append(float(der[i]))
        mono_loc.append((a, float(xs[i])))
        # f'' has the sign of x
        cm = np.sign(xs) * der2
        i = int(np.argmin(cm))
        conv_m.append(float(cm[i]))
        conv_loc.append((a, float(xs[i])))
        # derivative sandwich
        lo_gap = der - params.K0 * np.abs(xs) ** (s - 1.0)
        hi_gap = params.K1 * np.abs(xs) ** (s - 1.0) - der
        gap = np.minimum(lo_gap, hi_gap)
        i = int(np.argmin(gap))
        dcmp_m.append(float(gap[i]))
        dcmp_loc.append((a, float(xs[i])))
        # negative Schwarzian, at most chi
        sw = -(s ** 2 - 1.0) / (2.0 * xs * xs)
        gap = params.chi - sw
        i = int(np.argmin(gap))
        schw_m.append(float(gap[i]))
        schw_loc.append((a, float(xs[i])))
        # odd symmetry f_a(x) = -f_a(-x)
        sm = -np.abs(vals + vals[::-1]) + 1e-13
        i = int(np.argmin(sm))
        symm_m.append(float(sm[i]))
        symm_loc.append((a, float(xs[i])))
    record("monotone", np.array(mono_m), mono_loc)
    record("convexity_sign", np.array(conv_m), conv_loc)
    record("derivative_sandwich", np.array(dcmp_m), dcmp_loc, tol=1e-12)
    record("schwarzian", np.array(schw_m), schw_loc, tol=1e-10)
    record("symmetry", np.array(symm_m), symm_loc)

    # C^1 continuity in a: finite differences of f in a stay bounded
    ha = params.a_max * 1e-6
    xs_c = xs[:: max(1, len(xs) // 200)]
    cont = []
    cont_loc = []
    for a in avs[1:-1]:
        fd = (np.sign(xs_c) * ((2.0 - (a + ha)) * np.abs(xs_c) ** s - 1.0)
              - np.sign(xs_c) * ((2.0 - (a - ha)) * np.abs(xs_c) ** s - 1.0)) / (2 * ha)
        gap = 2.0 - np.abs(fd)  # |df/da| = |x|^s <= 1 < 2
        i = int(np.argmin(gap))
        cont.append(float(gap[i]))
        cont_loc.append((a, float(xs_c[i])))
    record("parameter_continuity", np.array(cont), cont_loc)

    # critical values move with unit speed: |d/da f_a(+-1)| = 1
    cv = []
    for a in avs:
        cv.append(-abs(abs(map_eval(a, 1.0, params).df_da) - 1.0) + 1e-12)
        cv.append(-abs(abs(map_eval(a, -1.0, params).df_da) - 1.0) + 1e-12)
    locs = [(a, x) for a in avs for x in (1.0, -1.0)]
    record("critical_value_speed", np.array(cv), locs)

    return AxiomReport(passed=passed, margin=margin, worst_at=worst_at)
