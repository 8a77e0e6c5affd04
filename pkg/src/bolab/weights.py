"""Weighted-space machinery.

Truncated weights <x>_N with build-time derivative audits, weighted and
Sobolev norms, Muckenhoupt A2 constants for power weights, the weighted
Hilbert-transform ratio and the weighted interpolation inequality.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import hyp2f1

from .errors import ConstructionError, PreconditionError
from .spectral_core import Field, bessel, hilbert


def _quintic_coeffs(cap_scale):
    """Coefficients of the quintic transition p(t), t = (|x| - N)/N on
    [N, 2N], matching value, slope and curvature of sqrt(1 + x^2) at
    x = N and the flat cap 3N/2 at x = 2N."""
    n = float(cap_scale)
    s0 = math.hypot(n, 1.0)
    rows = np.array([
        [1, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0],
        [0, 0, 2, 0, 0, 0],
        [1, 1, 1, 1, 1, 1],
        [0, 1, 2, 3, 4, 5],
        [0, 0, 2, 6, 12, 20],
    ], dtype=float)
    rhs = np.array([s0, (n / s0) * n, (n ** 2 / s0 ** 3), 1.5 * n, 0.0, 0.0])
    return np.linalg.solve(rows, rhs)


def _poly_eval(coeffs, t):
    out = np.zeros_like(t)
    for c in coeffs[::-1]:
        out = out * t + c
    return out


def _poly_deriv(coeffs):
    return np.array([k * coeffs[k] for k in range(1, len(coeffs))])


class TruncatedWeight:
    """The truncated weight <x>_N raised to a power m.

    Equals <x>^m for |x| <= N, the constant (3N/2)^m for |x| >= 2N, and a
    quintic interpolant of the base weight in between.  Construction runs
    a finite-difference audit of monotonicity and of the derivative decay
    bounds; use build_weight for the audited path.
    """

    def __init__(self, cap_scale, exponent, grid=None):
        self.cap_scale = int(cap_scale)
        self.exponent = float(exponent)
        self.grid = grid
        self._coeffs = _quintic_coeffs(self.cap_scale)
        self._dcoeffs = _poly_deriv(self._coeffs)
        self._ddcoeffs = _poly_deriv(self._dcoeffs)
        self.cap_value = (1.5 * self.cap_scale) ** self.exponent
        self.audit = None
        if grid is not None:
            self.samples = self.value(grid.x)
            self.samples.flags.writeable = False

    # base weight s(x) = <x>_N and its first two derivatives

    def base(self, x):
        x = np.abs(np.asarray(x, dtype=float))
        n = self.cap_scale
        out = np.empty_like(x)
        inner = x <= n
        outer = x >= 2 * n
        mid = ~(inner | outer)
        out[inner] = np.hypot(x[inner], 1.0)
        out[outer] = 1.5 * n
        t = (x[mid] - n) / n
        out[mid] = _poly_eval(self._coeffs, t)
        return out

    def base_deriv(self, x):
        x = np.asarray(x, dtype=float)
        sign = np.sign(x)
        ax = np.abs(x)
        n = self.cap_scale
        out = np.zeros_like(ax)
        inner = ax <= n
        mid = (ax > n) & (ax < 2 * n)
        out[inner] = ax[inner] / np.hypot(ax[inner], 1.0)
        t = (ax[mid] - n) / n
        out[mid] = _poly_eval(self._dcoeffs, t) / n
        return sign * out

    def base_second(self, x):
        ax = np.abs(np.asarray(x, dtype=float))
        n = self.cap_scale
        out = np.zeros_like(ax)
        inner = ax <= n
        mid = (ax > n) & (ax < 2 * n)
        out[inner] = np.hypot(ax[inner], 1.0) ** -3.0
        t = (ax[mid] - n) / n
        out[mid] = _poly_eval(self._ddcoeffs, t) / n ** 2
        return out

    # the powered weight w = s^m and its derivatives

    def value(self, x):
        return self.base(x) ** self.exponent

    def deriv(self, x):
        m = self.exponent
        return m * self.base(x) ** (m - 1.0) * self.base_deriv(x)

    def second(self, x):
        m = self.exponent
        s = self.base(x)
        sp = self.base_deriv(x)
        return m * (m - 1.0) * s ** (m - 2.0) * sp ** 2 \
            + m * s ** (m - 1.0) * self.base_second(x)

    def second_sup(self):
        n = self.cap_scale
        xs = np.linspace(0.0, 2.2 * n, 4001)
        return float(np.max(np.abs(self.second(xs))))

    def __call__(self, x):
        return self.value(x)


def run_weight_audit(weight, deriv_limit=None):
    """Finite-difference audit of the truncated-weight bounds.

    Checks that the base weight is even, nondecreasing in |x|, has a
    slope bounded independently of N, and that the powered weight obeys
    |d^k w| <= C / <x>^{k - m} for k = 1, 2, 3.  Returns the certificate
    dictionary; raises ConstructionError on violation.
    """
    n = weight.cap_scale
    m = weight.exponent
    xs = np.linspace(0.0, 2.4 * n, 6001)
    base = weight.base(xs)
    if np.any(np.diff(base) < -1e-9 * n):
        raise ConstructionError("truncated weight not nondecreasing")
    if abs(weight.base(0.0) - 1.0) > 1e-12:
        raise ConstructionError("truncated weight must equal 1 at x = 0")

    # the step grows with |x| so that float roundoff in the third
    # difference stays below the x^{-(3-m)} decay being certified
    h = 1e-3 * np.hypot(xs, 1.0)
    cert = {"cap_scale": n, "exponent": m}
    stencil = np.array([-2, -1, 0, 1, 2])
    w = weight.value(xs[:, None] + (h[:, None] * stencil[None, :]))
    d1 = (w[:, 0] - 8 * w[:, 1] + 8 * w[:, 3] - w[:, 4]) / (12 * h)
    d2 = (-w[:, 0] + 16 * w[:, 1] - 30 * w[:, 2] + 16 * w[:, 3]
          - w[:, 4]) / (12 * h ** 2)
    d3 = (-w[:, 0] + 2 * w[:, 1] - 2 * w[:, 3] + w[:, 4]) / (2 * h ** 3)
    bracket = np.hypot(xs, 1.0)
    for k, dk in ((1, d1), (2, d2), (3, d3)):
        sup = float(np.max(np.abs(dk) * bracket ** (k - m)))
        cert["deriv%d_weighted_sup" % k] = sup
        limit = deriv_limit if deriv_limit is not None \
            else 30.0 * (1.0 + abs(m)) ** 3
        if not np.isfinite(sup) or sup > limit:
            raise ConstructionError(
                "derivative bound audit failed at order %d (sup %.3g)"
                % (k, sup))
    base_slope = np.abs(weight.base_deriv(xs))
    cert["base_slope_sup"] = float(np.max(base_slope))
    if cert["base_slope_sup"] > 1.0 + 1e-9:
        raise ConstructionError("base slope exceeds the uniform bound 1")
    return cert


def build_weight(cap_scale, exponent, grid):
    """Construct an audited TruncatedWeight on a grid.

    Requires the cap region inside the box (2N <= L/2) and exponent in
    [-2, 8].
    """
    cap_scale = int(cap_scale)
    if not -2.0 <= float(exponent) <= 8.0:
        raise PreconditionError("weight exponent outside [-2, 8]")
    if 2 * cap_scale > grid.half_length / 2:
        raise PreconditionError(
            "cap region [N, 2N] must lie inside |x| <= L/2")
    w = TruncatedWeight(cap_scale, exponent, grid)
    w.audit = run_weight_audit(w)
    return w


def quintic_weight_callable(cap_scale, exponent):
    """Scalar callable x -> <x>_N^a for quadrature routines."""
    w = TruncatedWeight(cap_scale, exponent)

    def g(x):
        return float(w.value(np.asarray([x], dtype=float))[0])

    return g


@dataclass
class NormRecord:
    t: float
    sobolev: float           # ||J^s u||_2
    weighted: float          # ||<x>^r u||_2 (exact or truncated weight)
    combined: float          # Z_{s,r} norm
    mean_mode: float         # hat u(0, t)
    first_moment: float      # int x u dx

    def as_dict(self):
        return {"t": self.t, "sobolev": self.sobolev,
                "weighted": self.weighted, "combined": self.combined,
                "mean_mode": self.mean_mode,
                "first_moment": self.first_moment}


def z_norm(u, s, r, weight="exact", t=0.0):
    """Norms of u in the weighted Sobolev scale.

    weight is "exact" for <x>^r or an audited TruncatedWeight carrying
    exponent r.  Returns a NormRecord.
    """
    s = float(s)
    r = float(r)
    if not 0.0 <= s <= 5.0 or not 0.0 <= r <= 4.0:
        raise PreconditionError("z_norm needs s in [0, 5], r in [0, 4]")
    grid = u.grid
    sob = bessel(u, s).l2_norm()
    if weight == "exact":
        wv = (1.0 + grid.x ** 2) ** (r / 2.0)
    elif isinstance(weight, TruncatedWeight):
        if weight.exponent != r:
            raise PreconditionError("truncated weight exponent must equal r")
        wv = weight.value(grid.x)
    else:
        raise PreconditionError("weight must be 'exact' or a TruncatedWeight")
    wgt = float(np.sqrt(grid.dx * np.sum((wv * u.samples) ** 2)))
    combined = math.hypot(sob, wgt)
    return NormRecord(t, sob, wgt, combined, u.mean_mode(),
                      float(grid.dx * np.sum(grid.x * u.samples)))


# Muckenhoupt A2 constants ------------------------------------------------


def _angle_antideriv(c):
    """Antiderivative F(x) = int_0^x (1 + t^2)^{c/2} dt, valid at any
    scale.  Moderate arguments use the hypergeometric closed form; large
    arguments switch to the binomial tail series of (1 + t^{-2})^{c/2},
    whose k-th term integrates to t^{c-2k+1}/(c-2k+1) (or log t when the
    exponent vanishes, as it does for the half-integer weight powers)."""
    switch = 50.0

    def hyp(x):
        return x * hyp2f1(0.5, -c / 2.0, 1.5, -x ** 2)

    base = hyp(switch)

    def tail_series(t):
        total = np.zeros_like(t)
        coef = 1.0
        for k in range(5):
            if k > 0:
                coef *= (c / 2.0 - (k - 1)) / k
            power = c - 2 * k + 1
            if abs(power) < 1e-9:
                total += coef * np.log(t)
            else:
                total += coef * t ** power / power
        return total

    def anti(x):
        x = np.asarray(x, dtype=float)
        sign = np.sign(x)
        ax = np.abs(x)
        out = np.empty_like(ax)
        small = ax <= switch
        out[small] = hyp(ax[small])
        big = ~small
        out[big] = base + tail_series(ax[big]) - tail_series(
            np.full(np.sum(big), switch))
        return sign * out

    return anti


def _average_abs_power(c, a, b):
    """Averages of |x|^c over intervals [a, b] in closed form.  Intervals
    meeting the origin with c <= -1 average to infinity."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.empty_like(a)
    crosses = (a < 0) & (b > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        if c <= -1.0:
            out[crosses] = np.inf
        else:
            out[crosses] = (np.abs(a[crosses]) ** (c + 1)
                            + b[crosses] ** (c + 1)) \
                / ((c + 1) * (b[crosses] - a[crosses]))
        rest = ~crosses
        lo = np.minimum(np.abs(a[rest]), np.abs(b[rest]))
        hi = np.maximum(np.abs(a[rest]), np.abs(b[rest]))
        if c == -1.0:
            integral = np.log(hi / lo)
        else:
            integral = (hi ** (c + 1) - lo ** (c + 1)) / (c + 1)
        out[rest] = integral / (b[rest] - a[rest])
        if c <= -1.0:
            # an endpoint exactly at the origin
            at_zero = ((a == 0) | (b == 0)) & ~crosses
            out[at_zero] = np.inf
    return out


def _family_intervals(domain_half, depth=10, centers_per_length=33):
    """Dyadic interval family on [-R, R]: lengths R 2^{-m}, m = 0..depth,
    centers spanning [-R/2, R/2], plus origin-touching intervals."""
    pieces = []
    for m in range(depth + 1):
        length = domain_half * 2.0 ** (-m)
        ctrs = np.linspace(-domain_half / 2.0, domain_half / 2.0,
                           centers_per_length)
        ctrs = np.concatenate([ctrs, [0.0, length / 2.0, -length / 2.0]])
        pieces.append(np.stack([ctrs - length / 2.0,
                                ctrs + length / 2.0], axis=1))
    return np.concatenate(pieces, axis=0)


# increment-decay threshold separating slowly converging sups (finite A2
# constant approached algebraically) from log-divergent ones, whose
# per-level increments do not decay at all
A2_INCREMENT_DECAY = 0.99


def a2_constant(beta, weight_kind="angle", levels=24, base_half=8.0):
    """Muckenhoupt A2 scan for the weight w = <x>^{2 beta} or |x|^{2 beta}.

    The exponent convention follows the weighted space L^2(|x|^{2 beta} dx):
    beta is the weight power applied to the function, so the density in the
    A2 product is its square; the Hilbert transform is bounded on the
    weighted space exactly for beta in (-1/2, 1/2).

    Refinement level j evaluates the dyadic interval family on [-R_j, R_j]
    with R_j = base_half * 4^j ("angle") or base_half * 2^j ("abs"), all
    averages in closed form, so the family both refines and grows without
    any grid limit.  Classification: a level with an infinite product (the
    |x| weight losing local integrability) is divergent; otherwise the
    per-level sup increments must decay geometrically (ratio below
    A2_INCREMENT_DECAY per level) for the constant to be finite, since a
    log-divergent sup grows by a constant increment per domain doubling.
    """
    beta = float(beta)
    c = 2.0 * beta
    if weight_kind not in ("angle", "abs"):
        raise PreconditionError("weight_kind must be 'angle' or 'abs'")
    if weight_kind == "angle":
        anti_w = _angle_antideriv(c)
        anti_winv = _angle_antideriv(-c)

        def products(a, b):
            return ((anti_w(b) - anti_w(a)) / (b - a)
                    * (anti_winv(b) - anti_winv(a)) / (b - a))

        growth = 4.0
    else:
        def products(a, b):
            return _average_abs_power(c, a, b) * _average_abs_power(-c, a, b)

        growth = 2.0
    sups = []
    for j in range(levels):
        iv = _family_intervals(base_half * growth ** j)
        with np.errstate(invalid="ignore"):
            prod = products(iv[:, 0], iv[:, 1])
        sups.append(float(np.max(prod)))
    sups_arr = np.array(sups)
    if np.any(~np.isfinite(sups_arr)):
        divergent = True
    else:
        d = np.diff(sups_arr)
        scale = max(sups_arr[0], 1e-300)
        tail = d[-6:]
        if np.all(np.abs(tail) <= 1e-9 * scale):
            divergent = False
        elif np.all(tail > 0):
            decay = (tail[-1] / tail[0]) ** (1.0 / (len(tail) - 1))
            divergent = decay > A2_INCREMENT_DECAY
        else:
            divergent = False
    return {"beta": beta, "weight_kind": weight_kind,
            "levels": sups,
            "classification": "divergent" if divergent else "finite"}


def weighted_hilbert_ratio(f, beta, weight=None):
    """||w Hf||_2 / ||w f||_2 with w = <x>^beta or a truncated weight.

    beta must lie in the sharp A2 range (-1/2, 1/2)."""
    beta = float(beta)
    if not -0.5 < beta < 0.5:
        raise PreconditionError("beta outside (-1/2, 1/2)")
    grid = f.grid
    if weight is None:
        wv = (1.0 + grid.x ** 2) ** (beta / 2.0)
    else:
        wv = weight.value(grid.x)
    hf = hilbert(f)
    num = np.sqrt(grid.dx * np.sum((wv * hf.samples) ** 2))
    den = np.sqrt(grid.dx * np.sum((wv * f.samples) ** 2))
    return float(num / den)


def interpolation_check(u, a, b, c, d, theta):
    """Ratio for the weighted interpolation inequality: the norm with
    interpolated weight and smoothness exponents over the theta-weighted
    geometric mean of the endpoint norms."""
    theta = float(theta)
    if not 0.0 <= theta <= 1.0:
        raise PreconditionError("theta outside [0, 1]")
    grid = u.grid

    def wnorm(aa, bb):
        jb = bessel(u, bb)
        wv = (1.0 + grid.x ** 2) ** (aa / 2.0)
        return float(np.sqrt(grid.dx * np.sum((wv * jb.samples) ** 2)))

    lhs = wnorm(theta * a + (1 - theta) * c, theta * b + (1 - theta) * d)
    rhs = wnorm(a, b) ** theta * wnorm(c, d) ** (1 - theta)
    return lhs / rhs
