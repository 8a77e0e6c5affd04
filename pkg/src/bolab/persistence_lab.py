"""Experiment harness probing decay persistence thresholds.

Generates initial-data families with prescribed decay, evolves them on a
ladder of growing boxes at fixed physical resolution, tracks weighted
Sobolev norms, and classifies each weight exponent r as PERSISTS,
DIVERGES or INCONCLUSIVE.

Membership in a weighted space on the line is operationalized as
convergence of the box-truncated norm under domain doubling; divergence
as monotone growth across at least three ladder levels.  The discriminant
is the ratio of successive norm-squared increments: truncated tails
|x|^{-q} contribute increments scaling like L^{2r+1-2q}, so the increment
ratio across an L-doubling ladder cleanly separates convergent from
divergent weights even when the absolute norms grow slowly.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .bo_solver import SolverConfig, evolve, soliton
from .spectral_core import Field, Grid, frac_deriv, derivative
from .weights import TruncatedWeight, z_norm

FAMILIES = ("soliton", "gaussian", "dipole", "fourier-cusp")

# increment-ratio thresholds for the ladder classification
PERSIST_RATIO = 0.95
DIVERGE_RATIO = 1.05
NEGLIGIBLE_INCREMENT = 1e-8

TAIL_MONITOR_LIMIT = 1e-6


def theorem_regime(r, mean_zero):
    """Tag a weight exponent with its decay regime."""
    if r < 2.5:
        return "persists"
    if r < 3.5:
        return "mean-zero-required" if not mean_zero else "persists-mean-zero"
    return "forbidden"


def make_data(family, params, grid):
    """Sample an initial-data family on a grid.

    Families: soliton (c, x0, sign), gaussian (amplitude, width, center),
    dipole (exact derivative of a gaussian, mean-zero by construction),
    fourier-cusp (hat u0(xi) = exp(-xi^2) |xi|^gamma, mean-zero with
    algebraic spatial tail |x|^{-1-gamma}).
    """
    params = dict(params or {})
    if family == "soliton":
        return soliton(params.get("c", 1.0), params.get("x0", 0.0), grid,
                       int(params.get("sign", 1)))
    if family == "gaussian":
        amp = params.get("amplitude", 1.0)
        width = params.get("width", 1.0)
        center = params.get("center", 0.0)
        return Field(grid,
                     amp * np.exp(-((grid.x - center) / width) ** 2))
    if family == "dipole":
        width = params.get("width", 1.0)
        amp = params.get("amplitude", 1.0)
        z = grid.x / width
        return Field(grid, -2.0 * amp * z / width * np.exp(-z ** 2))
    if family == "fourier-cusp":
        gamma = float(params.get("gamma", 0.7))
        if not 0.0 < gamma < 2.0:
            raise PreconditionError("fourier-cusp needs gamma in (0, 2)")
        spec = np.exp(-grid.xi ** 2) * np.abs(grid.xi) ** gamma
        # even nonnegative symbol: the inverse transform is real and even
        u = np.fft.ifft(spec / grid.dx).real
        return Field(grid, u)
    raise PreconditionError("unknown data family %r" % family)


@dataclass
class ExperimentSpec:
    data_family: str
    params: dict
    r_list: list
    s_list: list
    ladder: list                  # [(n, half_length), ...]
    dt: float
    t_window: tuple = (0.0, 1.0)
    theta: float = 0.3
    dispersion_sign: float = 1.0
    snapshot_count: int = 5

    def validate(self):
        if self.data_family not in FAMILIES:
            raise PreconditionError("unknown family %r" % self.data_family)
        if not self.r_list:
            raise PreconditionError("empty r list")
        if any(not 0.0 <= r <= 4.0 for r in self.r_list):
            raise PreconditionError("r list must lie in [0, 4]")
        if len(self.ladder) < 3:
            raise PreconditionError("ladder needs at least 3 levels")
        if not 0.0 < self.theta <= 0.5:
            raise PreconditionError("theta must lie in (0, 1/2]")


@dataclass
class PersistenceReport:
    family: str
    ladder: list
    entries: dict                 # (s, r) -> classification record
    mean_zero: bool
    max_mean_mode: float
    tail_fractions: list
    aborted: bool = False
    abort_time: float = 0.0

    def verdict(self, s, r):
        return self.entries[(s, r)]["verdict"]

    def as_dict(self):
        return {
            "family": self.family,
            "ladder": [list(level) for level in self.ladder],
            "mean_zero": self.mean_zero,
            "max_mean_mode": self.max_mean_mode,
            "tail_fractions": self.tail_fractions,
            "aborted": self.aborted,
            "abort_time": self.abort_time,
            "entries": [dict(entry, s=s, r=r)
                        for (s, r), entry in sorted(self.entries.items())],
        }


def classify_increments(values):
    """Classify a ladder of norm-squared values by increment ratios.

    Returns (verdict, ratio).  Geometrically shrinking increments mean the
    truncated norms converge (PERSISTS); monotone growth with increment
    ratio >= DIVERGE_RATIO across the ladder means the norm on the line is
    infinite (DIVERGES); anything in between is INCONCLUSIVE.
    """
    v = np.asarray(values, dtype=float)
    d = np.diff(v)
    scale = max(v[0], 1e-300)
    if np.all(np.abs(d) <= NEGLIGIBLE_INCREMENT * scale):
        return "PERSISTS", 0.0
    if d[-2] <= 0 or d[-1] <= 0:
        if abs(d[-1]) <= NEGLIGIBLE_INCREMENT * scale:
            return "PERSISTS", 0.0
        return "INCONCLUSIVE", float("nan")
    ratio = float(d[-1] / d[-2])
    if ratio <= PERSIST_RATIO:
        return "PERSISTS", ratio
    if ratio >= DIVERGE_RATIO and np.all(d > 0):
        return "DIVERGES", ratio
    return "INCONCLUSIVE", ratio


def _tail_fraction(u, grid):
    """Mass fraction of u^2 in the outer quarter of the box."""
    outer = np.abs(grid.x) >= 0.75 * grid.half_length
    total = np.sum(u ** 2) + 1e-300
    return float(np.sum(u[outer] ** 2) / total)


def run_persistence(spec):
    """Evolve the data family over the grid ladder and classify each
    (s, r) pair.  See the module docstring for the classification rule."""
    spec.validate()
    t1, t2 = spec.t_window
    level_series = []
    tail_fracs = []
    mean_modes = []
    for n, half_length in spec.ladder:
        grid = Grid(n, half_length)
        u0 = make_data(spec.data_family, spec.params, grid)
        nsteps = max(1, int(round(t2 / spec.dt)))
        stride = max(1, nsteps // spec.snapshot_count)
        cfg = SolverConfig(grid, spec.dt, t2,
                           dispersion_sign=spec.dispersion_sign,
                           snapshot_stride=stride)
        if t2 > 0:
            run = evolve(u0, cfg)
            times, snaps = run.times, run.snapshots
        else:
            times, snaps = [0.0], [u0.samples]
        keep = [(t, s) for t, s in zip(times, snaps) if t >= t1 - 1e-12]
        if not keep:
            keep = [(times[-1], snaps[-1])]
        level_series.append((grid, keep))
        tail_fracs.append(max(_tail_fraction(s, grid) for _, s in keep))
        mean_modes.append(max(abs(Field(grid, s).mean_mode())
                              for _, s in keep))

    u0_norm = level_series[0][1][0][1]
    base_grid = level_series[0][0]
    u0_l2 = math.sqrt(base_grid.dx * np.sum(u0_norm ** 2))
    mean_zero = max(mean_modes) <= 1e-10 * u0_l2

    entries = {}
    for s in spec.s_list:
        for r in spec.r_list:
            sampled_times = [t for t, _ in level_series[0][1]]
            per_time = []
            for ti in range(len(sampled_times)):
                vals = []
                for grid, keep in level_series:
                    t, samples = keep[min(ti, len(keep) - 1)]
                    rec = z_norm(Field(grid, samples), s, r)
                    vals.append(rec.weighted ** 2)
                per_time.append(vals)
            final_vals = per_time[-1]
            verdict, ratio = classify_increments(final_vals)
            conv_flags = [classify_increments(vals)[0] == "PERSISTS"
                          for vals in per_time]
            if verdict == "PERSISTS" and not all(conv_flags):
                verdict = "INCONCLUSIVE"
            if max(tail_fracs) > TAIL_MONITOR_LIMIT:
                verdict = "INCONCLUSIVE"
            entries[(s, r)] = {
                "regime": theorem_regime(r, mean_zero),
                "verdict": verdict,
                "increment_ratio": ratio,
                "norms_sq": final_vals,
                "sampled_times": sampled_times,
                "converged_in_l": conv_flags,
            }
    return PersistenceReport(spec.data_family, list(spec.ladder), entries,
                             mean_zero, float(max(mean_modes)), tail_fracs)


def smoothing_budget(times, snapshots, grid, theta, variant="step1",
                     cap_scale=16):
    """Time-integrated weighted smoothing functional along a run.

    variant "step1" integrates (D^{1/2}(x u))^2 <x>_N^{2 theta};
    variant "step3" integrates (D^{1/2} d_x u)^2 <x>_N^{2 theta}.
    The time integral is a trapezoid over the snapshots; halving the
    snapshot stride audits the quadrature (reported as stride_audit,
    the relative change).
    """
    theta = float(theta)
    if not 0.0 < theta < 0.5:
        raise PreconditionError("theta must lie in (0, 1/2)")
    if variant not in ("step1", "step3"):
        raise PreconditionError("variant must be 'step1' or 'step3'")
    weight = TruncatedWeight(cap_scale, 2.0 * theta)
    wv = weight.value(grid.x)

    def density(samples):
        u = Field(grid, samples)
        if variant == "step1":
            g = frac_deriv(Field(grid, grid.x * samples), 0.5)
        else:
            g = frac_deriv(derivative(u, 1), 0.5)
        return float(grid.dx * np.sum(g.samples ** 2 * wv))

    times = np.asarray(times, dtype=float)
    values = np.array([density(s) for s in snapshots])
    total = float(np.trapezoid(values, times))
    # the coarse comparison must keep the final snapshot, otherwise the
    # audit measures interval truncation instead of quadrature error
    idx = list(range(0, len(values), 2))
    if idx[-1] != len(values) - 1:
        idx.append(len(values) - 1)
    coarse = float(np.trapezoid(values[idx], times[idx]))
    audit = abs(total - coarse) / (abs(total) + 1e-300)
    return {"value": total, "stride_audit": audit,
            "theta": theta, "variant": variant, "cap_scale": cap_scale}


def threshold_scan(data_family, params, r_grid, t_probe, ladder, dt,
                   s=0.0, dispersion_sign=1.0):
    """Classify each r in r_grid and estimate the persistence boundary.

    Returns a dict with per-r rows and the boundary estimate (midpoint of
    the last PERSISTS and first DIVERGES exponents); a non-monotone
    classification yields boundary None and flag INCONCLUSIVE.
    """
    r_grid = sorted(float(r) for r in r_grid)
    spec = ExperimentSpec(data_family, params, r_grid, [s], ladder, dt,
                          t_window=(t_probe, t_probe) if t_probe == 0
                          else (0.0, t_probe),
                          dispersion_sign=dispersion_sign)
    report = run_persistence(spec)
    rows = []
    for r in r_grid:
        entry = report.entries[(s, r)]
        rows.append({"r": r, "verdict": entry["verdict"],
                     "increment_ratio": entry["increment_ratio"],
                     "norms_sq": entry["norms_sq"]})
    verdicts = [row["verdict"] for row in rows]
    boundary = None
    monotone = True
    last_persist = None
    first_diverge = None
    for r, v in zip(r_grid, verdicts):
        if v == "PERSISTS":
            if first_diverge is not None:
                monotone = False
            last_persist = r
        elif v == "DIVERGES" and first_diverge is None:
            first_diverge = r
    if monotone and last_persist is not None and first_diverge is not None:
        boundary = 0.5 * (last_persist + first_diverge)
    return {"family": data_family, "rows": rows, "boundary": boundary,
            "monotone": monotone, "report": report}
