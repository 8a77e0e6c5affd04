"""Weighted-space machinery: truncated weights, norms, A2 scans.

The A2 oracle is the classical dichotomy for power weights: |x|^c is an
A2 weight on the line exactly when -1 < c < 1, and the angular variant
<x>^c based on bounded weights is A2 for every c once the growth is
capped, while the pure power keeps the same window.
"""

import numpy as np
import pytest

from bolab.errors import PreconditionError
from bolab.spectral_core import Field, Grid
from bolab.weights import (TruncatedWeight, a2_constant, build_weight,
                           interpolation_check, run_weight_audit,
                           weighted_hilbert_ratio, z_norm)


# truncated weight geometry -----------------------------------------------

@pytest.mark.parametrize("cap", [16.0, 64.0, 256.0])
def test_weight_matches_japanese_bracket_inside(cap):
    w = TruncatedWeight(cap, 1.0)
    x = np.linspace(-cap * 0.99, cap * 0.99, 401)
    assert np.allclose(w.value(x), np.sqrt(1.0 + x ** 2), rtol=1e-12)


@pytest.mark.parametrize("cap", [16.0, 64.0])
def test_weight_flat_outside(cap):
    w = TruncatedWeight(cap, 1.0)
    x = np.array([2.0 * cap, 3.0 * cap, 10.0 * cap])
    assert np.allclose(w.value(x), 1.5 * cap, rtol=1e-12)
    assert np.allclose(w.deriv(x), 0.0, atol=1e-12)


def test_weight_transition_smoothness():
    # quintic bridge: continuity of value, slope and curvature at both
    # junctions, probed by two-sided finite differences
    cap = 32.0
    w = TruncatedWeight(cap, 1.0)
    h = 1e-6
    for knot in (cap, 2.0 * cap):
        for fn in (w.base, w.base_deriv, w.base_second):
            left = fn(np.array([knot - h]))[0]
            right = fn(np.array([knot + h]))[0]
            assert abs(left - right) < 1e-4 * (1.0 + abs(left))


def test_weight_monotone_and_even():
    w = TruncatedWeight(16.0, 1.0)
    x = np.linspace(0.0, 64.0, 1001)
    vals = w.value(x)
    assert np.all(np.diff(vals) >= -1e-12)
    assert np.allclose(w.value(-x), vals, rtol=1e-14)


def test_weight_negative_exponent():
    w = TruncatedWeight(16.0, -1.0)
    x = np.linspace(-40.0, 40.0, 801)
    assert np.allclose(w.value(x), 1.0 / TruncatedWeight(16.0, 1.0).value(x),
                       rtol=1e-12)


@pytest.mark.parametrize("cap", [16.0, 64.0, 256.0])
def test_weight_audit_certificates(cap):
    w = TruncatedWeight(cap, 1.0)
    cert = run_weight_audit(w)
    # derivative sups are cap-uniform once weighted by <x>^{k-m}
    assert cert["base_slope_sup"] <= 1.0 + 1e-6
    assert cert["deriv1_weighted_sup"] < 2.0
    assert cert["deriv2_weighted_sup"] < 240.0
    assert cert["deriv3_weighted_sup"] < 240.0


def test_build_weight_refuses_cap_outside_box():
    g = Grid(1024, 64.0)
    with pytest.raises(PreconditionError):
        build_weight(32.0, 1.0, g)     # cap region would reach |x| = 64
    build_weight(8.0, 1.0, g)


def test_build_weight_refuses_extreme_exponent():
    g = Grid(1024, 64.0)
    with pytest.raises(PreconditionError):
        build_weight(8.0, 9.0, g)


# Z norms ------------------------------------------------------------------

def test_z_norm_gaussian_closed_form(grid_small):
    u = Field.from_function(grid_small, lambda x: np.exp(-x ** 2))
    rec = z_norm(u, 0.0, 0.0)
    assert np.isclose(rec.sobolev, (np.pi / 2.0) ** 0.25, atol=1e-12)
    assert np.isclose(rec.weighted, (np.pi / 2.0) ** 0.25, atol=1e-12)


def test_z_norm_monotone_in_r(grid_small):
    u = Field.from_function(grid_small, lambda x: np.exp(-x ** 2))
    vals = [z_norm(u, 0.5, r).weighted for r in (0.5, 1.0, 1.5, 2.0)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_z_norm_soliton_tail_power_counting():
    # the algebraic soliton has u ~ 4 / (c x^2); <x>^r u is square
    # integrable iff r < 3/2, so the weighted norm must stabilize under
    # box doubling for r = 1.4 and keep growing for r = 1.6
    from bolab.bo_solver import soliton
    records = {1.4: [], 1.6: []}
    for n, L in ((4096, 256.0), (8192, 512.0), (16384, 1024.0)):
        g = Grid(n, L)
        u = soliton(1.0, 0.0, g)
        for r in records:
            records[r].append(z_norm(u, 0.0, r).weighted)
    for r, vals in records.items():
        growth = [b / a for a, b in zip(vals, vals[1:])]
        if r == 1.4:
            # convergent tail: growth factors shrink toward 1
            assert growth[-1] < 1.03
            assert growth[-1] < growth[0]
        else:
            # divergent tail ~ L^{0.1} in norm: steady growth per doubling
            assert growth[-1] > 1.07


def test_z_norm_truncated_weight_option(grid_small):
    u = Field.from_function(grid_small, lambda x: np.exp(-x ** 2))
    w = TruncatedWeight(8.0, 1.0)
    rec = z_norm(u, 0.5, 1.0, weight=w)
    exact = z_norm(u, 0.5, 1.0)
    # the cap only matters in the far tail, invisible for a narrow bump
    assert np.isclose(rec.weighted, exact.weighted, rtol=1e-8)


# A2 scans -----------------------------------------------------------------

# power-weight dichotomy: |x|^{2 beta} and the capped-growth variant are
# both A2 exactly when |beta| < 1/2; the endpoint fails from the origin
# singularity (negative beta) or the unbounded growth (positive beta)
A2_EXPECT = {
    -0.6: ("divergent", "divergent"),
    -0.5: ("divergent", "divergent"),
    -0.49: ("finite", "finite"),
    -0.2: ("finite", "finite"),
    0.2: ("finite", "finite"),
    0.49: ("finite", "finite"),
    0.5: ("divergent", "divergent"),
    0.6: ("divergent", "divergent"),
}


@pytest.mark.parametrize("beta", sorted(A2_EXPECT))
def test_a2_classification(beta):
    expect_angle, expect_abs = A2_EXPECT[beta]
    res_angle = a2_constant(beta, "angle")
    res_abs = a2_constant(beta, "abs")
    assert res_angle["classification"] == expect_angle
    assert res_abs["classification"] == expect_abs


def test_a2_finite_plateau():
    res = a2_constant(0.49, "angle")
    levels = res["levels"]
    assert abs(levels[-1] - levels[-2]) <= 0.05 * levels[-1]


def test_a2_divergent_grows():
    res = a2_constant(0.6, "abs")
    levels = [v for v in res["levels"] if np.isfinite(v)]
    if len(levels) >= 2:
        assert levels[-1] > levels[0]


# weighted Hilbert ---------------------------------------------------------

def test_weighted_hilbert_bounded_inside_window(grid_medium, rng):
    from bolab.fracops import random_band_limited
    worst = 0.0
    for _ in range(10):
        f = random_band_limited(grid_medium, rng)
        for beta in (-0.4, -0.2, 0.2, 0.4):
            ratio = weighted_hilbert_ratio(f, beta)
            assert np.isfinite(ratio)
            worst = max(worst, ratio)
    assert worst < 50.0


def test_weighted_hilbert_refuses_endpoint(grid_medium, gaussian_medium):
    with pytest.raises(PreconditionError):
        weighted_hilbert_ratio(gaussian_medium, 0.5)
    with pytest.raises(PreconditionError):
        weighted_hilbert_ratio(gaussian_medium, -0.5)


# interpolation ------------------------------------------------------------

def test_interpolation_inequality_random(grid_medium, rng):
    from bolab.fracops import random_band_limited
    for _ in range(10):
        f = random_band_limited(grid_medium, rng)
        for theta in (0.25, 0.5, 0.75):
            ratio = interpolation_check(f, 0.0, 2.0, 0.0, 1.0, theta)
            assert ratio <= 1.0 + 1e-9


def test_interpolation_equality_at_endpoints(grid_medium, gaussian_medium):
    r0 = interpolation_check(gaussian_medium, 0.0, 2.0, 0.0, 1.0, 0.0)
    assert r0 <= 1.0 + 1e-12
