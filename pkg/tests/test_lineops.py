"""Tests for the image-corrected line operators.

Oracles: scipy's Hurwitz zeta on its native domain, closed forms for the
Hilbert transform of the Lorentzian and for fractional derivatives of
power laws on the line.
"""

import numpy as np
import pytest
from scipy.special import gamma, zeta

from bolab.errors import PreconditionError
from bolab.lineops import LineCalculus, check_support, hurwitz_zeta
from bolab.spectral_core import Field, Grid


# Hurwitz zeta -------------------------------------------------------------

@pytest.mark.parametrize("a,q", [(2.0, 0.3), (3.5, 0.9), (1.5, 0.05),
                                 (2.5, 0.5)])
def test_hurwitz_zeta_matches_scipy(a, q):
    assert np.isclose(hurwitz_zeta(a, q), zeta(a, q), rtol=1e-12)


def test_hurwitz_zeta_continuation_reflection():
    # zeta(s, 1) is the Riemann zeta function; check a continued value
    # against the known zeta(1/2) = -1.4603545088...
    assert np.isclose(hurwitz_zeta(0.5, 1.0), -1.4603545088095868,
                      atol=1e-10)


def test_hurwitz_zeta_recurrence():
    # zeta(a, q) = zeta(a, q + 1) + q^{-a}
    a, q = 0.7, 0.4
    lhs = hurwitz_zeta(a, q)
    rhs = hurwitz_zeta(a, q + 1.0) + q ** (-a)
    assert np.isclose(lhs, rhs, rtol=1e-12)


# line Hilbert transform ---------------------------------------------------

@pytest.mark.parametrize("half_length", [64.0, 128.0, 256.0])
def test_line_hilbert_lorentzian(half_length):
    g = Grid(4096, half_length)
    calc = LineCalculus(g)
    f = 1.0 / (1.0 + g.x ** 2)
    out = calc.hilbert.apply_samples(f)
    exact = g.x / (1.0 + g.x ** 2)
    window = np.abs(g.x) <= half_length / 4.0
    err = np.max(np.abs(out[window] - exact[window]))
    # the image correction removes the O(1/L) periodization defect; what
    # is left is the slow x^{-1} tail of the Lorentzian itself entering
    # through the far-field kernel truncation
    assert err <= 10.0 / half_length
    assert err <= 0.02


def test_line_hilbert_beats_periodic():
    g = Grid(4096, 64.0)
    calc = LineCalculus(g)
    f = np.exp(-g.x ** 2)
    line = calc.hilbert.apply_samples(f)
    periodic = np.real(np.fft.ifft(
        np.fft.fft(f) * (-1j) * np.sign(np.fft.fftfreq(g.n))))
    # closed form: H[e^{-x^2}] = (2/sqrt(pi)) dawson(x)
    from scipy.special import dawsn
    exact = 2.0 / np.sqrt(np.pi) * dawsn(g.x)
    window = np.abs(g.x) <= 16.0
    err_line = np.max(np.abs(line[window] - exact[window]))
    err_per = np.max(np.abs(periodic[window] - exact[window]))
    assert err_line < 1e-6
    assert err_line < err_per / 100.0


def test_line_hilbert_dx_gaussian():
    # d/dx of the dawson closed form
    from scipy.special import dawsn
    g = Grid(8192, 128.0)
    calc = LineCalculus(g)
    f = np.exp(-g.x ** 2)
    out = calc.hilbert_dx.apply_samples(f)
    exact = 2.0 / np.sqrt(np.pi) * (1.0 - 2.0 * g.x * dawsn(g.x))
    window = np.abs(g.x) <= 32.0
    assert np.max(np.abs(out[window] - exact[window])) < 1e-6


def test_line_frac_gaussian_quadrature_oracle():
    # line value of D^{1/2} e^{-x^2} by direct Fourier quadrature
    from scipy.integrate import quad
    g = Grid(4096, 64.0)
    calc = LineCalculus(g)
    f = np.exp(-g.x ** 2)
    out = calc.frac(0.5).apply_samples(f)
    for xpt in (0.0, 1.0, -3.0):
        oracle = quad(
            lambda xi: np.sqrt(xi) * np.sqrt(np.pi)
            * np.exp(-xi ** 2 / 4.0) * np.cos(xi * xpt) / np.pi,
            0.0, 40.0, limit=400)[0]
        idx = np.argmin(np.abs(g.x - xpt))
        assert np.isclose(out[idx], oracle, atol=1e-7)


def test_line_frac_far_field_power_tail():
    # beyond the support, D^{1/2} of a unit-mass bump decays like
    # c_K m0 |x|^{-3/2} with c_K = -Gamma(3/2) sin(pi/4) / pi
    g = Grid(8192, 256.0)
    calc = LineCalculus(g)
    f = np.exp(-g.x ** 2)
    out = calc.frac(0.5).apply_samples(f)
    ck = -gamma(1.5) * np.sin(np.pi / 4.0) / np.pi
    m0 = np.sqrt(np.pi)
    sel = (np.abs(g.x) > 20.0) & (np.abs(g.x) < 60.0)
    pred = ck * m0 * np.abs(g.x[sel]) ** (-1.5)
    assert np.max(np.abs(out[sel] - pred) / np.abs(pred)) < 0.01


def test_check_support_refuses_wide_field():
    g = Grid(1024, 64.0)
    f = Field.from_function(g, lambda x: np.exp(-(x / 40.0) ** 2))
    with pytest.raises(PreconditionError):
        check_support(f)
    narrow = Field.from_function(g, lambda x: np.exp(-x ** 2))
    check_support(narrow)


def test_line_calculus_caches_operators(grid_small):
    calc = LineCalculus(grid_small)
    assert calc.frac(0.5) is calc.frac(0.5)
