"""Uniform periodic grids and the Fourier-multiplier engine.

Every operator in this package (Hilbert transform, fractional derivative,
Bessel potential) is a diagonal symbol acting on the spectrum of a real
field sampled on a periodic box [-L, L).  Conventions:

* frequencies  xi_k = pi * k / L  in standard FFT ordering,
* Hilbert transform symbol  -i sgn(xi)  with sgn(0) = 0,
* |0|^s = 0 for s <= 0 (the mean channel is excluded from singular symbols),
* the Nyquist mode is zeroed for odd symbols, which have no sign pairing.

Functions on the real line are represented by samples supported well inside
the box (support radius <= L/4 by convention) so that wrap-around stays
below tolerance.
"""

import numpy as np

from .errors import ConventionError, PreconditionError


def _is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


class Grid:
    """Uniform discretization of [-L, L) with its FFT frequency ladder.

    Parameters
    ----------
    n : int
        Point count, a power of two, at least 16.
    half_length : float
        Box half-length L.
    """

    def __init__(self, n, half_length):
        n = int(n)
        half_length = float(half_length)
        if not _is_power_of_two(n) or n < 16:
            raise PreconditionError(
                "grid size must be a power of two >= 16, got %d" % n)
        if not half_length > 0:
            raise PreconditionError("half_length must be positive")
        self.n = n
        self.half_length = half_length
        self.dx = 2.0 * half_length / n
        self.x = -half_length + self.dx * np.arange(n)
        self.xi = 2.0 * np.pi * np.fft.fftfreq(n, d=self.dx)
        self.x.flags.writeable = False
        self.xi.flags.writeable = False

    @property
    def nyquist_index(self):
        return self.n // 2

    @property
    def xi_max(self):
        return np.pi / self.dx

    def __eq__(self, other):
        return (isinstance(other, Grid) and self.n == other.n
                and self.half_length == other.half_length)

    def __hash__(self):
        return hash((self.n, self.half_length))

    def __repr__(self):
        return "Grid(n=%d, half_length=%g)" % (self.n, self.half_length)


class Field:
    """A real function sampled on a Grid, with a lazily cached spectrum."""

    def __init__(self, grid, samples):
        samples = np.asarray(samples, dtype=float)
        if samples.shape != (grid.n,):
            raise PreconditionError(
                "samples shape %s does not match grid size %d"
                % (samples.shape, grid.n))
        self.grid = grid
        self.samples = samples.copy()
        self.samples.flags.writeable = False
        self._spectrum = None

    @classmethod
    def from_function(cls, grid, func):
        return cls(grid, func(grid.x))

    @classmethod
    def from_spectrum(cls, grid, spectrum, imag_tol=1e-12):
        """Build a Field from FFT coefficients, checking the inverse
        transform is real to within imag_tol relative to the field size."""
        u = np.fft.ifft(spectrum)
        scale = np.linalg.norm(u.real) + 1e-300
        if np.linalg.norm(u.imag) > imag_tol * scale:
            raise ConventionError(
                "spectrum is not conjugate-symmetric: imaginary residue %g"
                % (np.linalg.norm(u.imag) / scale))
        f = cls(grid, u.real)
        f._spectrum = np.asarray(spectrum, dtype=complex)
        return f

    @property
    def spectrum(self):
        if self._spectrum is None:
            self._spectrum = np.fft.fft(self.samples)
        return self._spectrum

    def l2_norm(self):
        """L2 norm with the trapezoid (= rectangle, periodic) quadrature."""
        return float(np.sqrt(self.grid.dx * np.sum(self.samples ** 2)))

    def integral(self):
        return float(self.grid.dx * np.sum(self.samples))

    def mean_mode(self):
        """The zero-frequency coefficient hat{u}(0) = integral of u."""
        return float(self.spectrum[0].real) * self.grid.dx

    def __add__(self, other):
        self._check(other)
        return Field(self.grid, self.samples + other.samples)

    def __sub__(self, other):
        self._check(other)
        return Field(self.grid, self.samples - other.samples)

    def __mul__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return Field(self.grid, self.samples * other.samples)
        return Field(self.grid, self.samples * float(other))

    __rmul__ = __mul__

    def _check(self, other):
        if self.grid != other.grid:
            raise PreconditionError("fields live on different grids")


class MultiplierSpec:
    """A diagonal Fourier symbol with explicit zero-mode and Nyquist rules.

    symbol may be a callable of the frequency array or a precomputed array.
    zero_mode and nyquist, when given, override the symbol at xi = 0 and at
    the Nyquist frequency.
    """

    def __init__(self, symbol, zero_mode=None, nyquist=None, name=""):
        self.symbol = symbol
        self.zero_mode = zero_mode
        self.nyquist = nyquist
        self.name = name

    def values(self, grid):
        if callable(self.symbol):
            m = np.asarray(self.symbol(grid.xi), dtype=complex)
        else:
            m = np.asarray(self.symbol, dtype=complex)
        if m.shape != grid.xi.shape:
            raise PreconditionError("symbol shape does not match grid")
        m = m.copy()
        if self.zero_mode is not None:
            m[0] = self.zero_mode
        if self.nyquist is not None:
            m[grid.nyquist_index] = self.nyquist
        return m

    def check(self, grid):
        """Validate the symbol keeps real fields real: m(-xi) = conj(m(xi))."""
        m = self.values(grid)
        if np.any(~np.isfinite(m)):
            raise PreconditionError(
                "symbol %r contains non-finite values" % self.name)
        mr = np.roll(m[::-1], 1)       # index k -> -k, fixing k = 0
        err = np.max(np.abs(mr - np.conj(m)))
        scale = np.max(np.abs(m)) + 1e-300
        if err > 1e-12 * scale:
            raise ConventionError(
                "symbol %r violates conjugate symmetry (residue %g)"
                % (self.name, err / scale))
        return m


def apply_multiplier(f, m):
    """Apply a MultiplierSpec to a Field, returning a new Field."""
    mv = m.check(f.grid)
    spec = mv * f.spectrum
    u = np.fft.ifft(spec)
    out = Field(f.grid, u.real)
    out._spectrum = spec
    return out


def _sgn_symbol(xi):
    return -1j * np.sign(xi)


def hilbert(f):
    """Hilbert transform, Fourier multiplier -i sgn(xi), sgn(0) = 0.

    With this convention H cos(kx) = sin(kx) for k > 0, and H(Hf) =
    -(f - mean f) since the zero mode is annihilated.
    """
    m = MultiplierSpec(_sgn_symbol, zero_mode=0.0, nyquist=0.0, name="H")
    return apply_multiplier(f, m)


def derivative(f, order=1):
    """Spectral derivative (i xi)^order, Nyquist zeroed for odd orders."""
    order = int(order)
    nyq = 0.0 if order % 2 == 1 else None
    m = MultiplierSpec(lambda xi: (1j * xi) ** order, nyquist=nyq,
                       name="d^%d" % order)
    return apply_multiplier(f, m)


def frac_deriv_symbol(xi, s):
    ax = np.abs(xi)
    with np.errstate(divide="ignore"):
        out = np.where(ax == 0.0, 0.0, np.where(ax == 0.0, 1.0, ax) ** s)
    return out.astype(complex)


def frac_deriv(f, s):
    """Fractional derivative D^s, symbol |xi|^s with |0|^s := 0.

    For s < 0 the input must be mean-zero: |hat{u}(0)| <= 1e-10 ||u||_2.
    """
    s = float(s)
    if not -1.0 <= s <= 4.0:
        raise PreconditionError("frac_deriv order s=%g outside [-1, 4]" % s)
    if s < 0:
        nrm = f.l2_norm() + 1e-300
        if abs(f.mean_mode()) > 1e-10 * nrm:
            raise PreconditionError(
                "D^s with s<0 requires mean-zero input, hat{u}(0)=%g"
                % f.mean_mode())
    m = MultiplierSpec(lambda xi: frac_deriv_symbol(xi, s), name="D^%g" % s)
    return apply_multiplier(f, m)


def bessel(f, s):
    """Bessel potential J^s, symbol (1 + xi^2)^{s/2}."""
    s = float(s)
    if not -4.0 <= s <= 4.0:
        raise PreconditionError("bessel order s=%g outside [-4, 4]" % s)
    m = MultiplierSpec(lambda xi: (1.0 + xi ** 2) ** (s / 2.0) + 0j,
                       name="J^%g" % s)
    return apply_multiplier(f, m)


def dealias_mask(n):
    """2/3-rule mask: modes with |k| >= n/3 are zeroed."""
    k = np.fft.fftfreq(n) * n
    mask = np.ones(n)
    mask[np.abs(k) >= n / 3.0] = 0.0
    return mask


def dealias(f):
    """Zero the top third of modes (2/3 rule); idempotent."""
    mask = dealias_mask(f.grid.n)
    spec = f.spectrum * mask
    out = Field(f.grid, np.fft.ifft(spec).real)
    out._spectrum = spec
    return out
