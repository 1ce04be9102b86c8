"""Sampled periodic grids and discrete Fourier analysis.

A grid function lives on a periodic box of side ``L`` with ``N`` samples per
axis, either as space samples or as frequency samples on the dual grid with
spacing ``1/L``.  The forward transform approximates
``F f(xi) = integral f(x) exp(-2 pi i x.xi) dx`` by its Riemann sum, which the
centered FFT evaluates exactly; forward-then-inverse is the identity to
rounding error.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError
from .profiles import plateau
from . import geometry


@dataclass(frozen=True)
class GridSpec:
    d: int
    L: float
    N: int

    def __post_init__(self):
        if self.d < 1 or self.L <= 0 or self.N < 4:
            raise ArgumentError("grid needs d >= 1, L > 0, N >= 4")
        if self.N & (self.N - 1):
            raise ArgumentError("N must be a power of two")

    @property
    def dx(self):
        return self.L / self.N

    @property
    def dxi(self):
        return 1.0 / self.L

    @property
    def nyquist(self):
        """Largest representable ordinary frequency, N/(2L)."""
        return self.N / (2.0 * self.L)

    def space_axis(self):
        return (np.arange(self.N) - self.N // 2) * self.dx

    def freq_axis(self):
        return (np.arange(self.N) - self.N // 2) * self.dxi

    def space_points(self):
        axes = [self.space_axis()] * self.d
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def freq_points(self):
        axes = [self.freq_axis()] * self.d
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    @property
    def shape(self):
        return (self.N,) * self.d

    def cell_volume(self, domain):
        return (self.dx if domain == "space" else self.dxi) ** self.d


class GridFunction:
    """Complex samples on a periodic grid, tagged space- or frequency-side."""

    def __init__(self, values, domain, grid):
        values = np.asarray(values, dtype=complex)
        if values.shape != grid.shape:
            raise ArgumentError(f"values shape {values.shape} != grid shape {grid.shape}")
        if domain not in ("space", "frequency"):
            raise ArgumentError("domain must be 'space' or 'frequency'")
        self.values = values
        self.domain = domain
        self.grid = grid

    def to_frequency(self):
        if self.domain == "frequency":
            return self
        v = np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(self.values)))
        return GridFunction(v * self.grid.dx ** self.grid.d, "frequency", self.grid)

    def to_space(self):
        if self.domain == "space":
            return self
        v = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(self.values)))
        return GridFunction(v / self.grid.dx ** self.grid.d, "space", self.grid)

    def norm_lp(self, p):
        """Riemann L^p norm on the function's own domain (p = inf is the max)."""
        return lp_norm(self.values, p, self.grid.cell_volume(self.domain))

    def norm_l2(self):
        return self.norm_lp(2)

    def scaled(self, factor):
        return GridFunction(self.values * factor, self.domain, self.grid)


def lp_norm(values, p, cell_volume):
    a = np.abs(np.asarray(values))
    if p == np.inf:
        return float(a.max()) if a.size else 0.0
    if p <= 0:
        raise ArgumentError("p must be positive or inf")
    return float((np.sum(a ** p) * cell_volume) ** (1.0 / p))


def freq_grid_function(grid, values):
    return GridFunction(values, "frequency", grid)


def space_grid_function(grid, values):
    return GridFunction(values, "space", grid)


# ---------------------------------------------------------------------------
# signal constructors
# ---------------------------------------------------------------------------


def gaussian_signal(grid, center=None, freq_center=None, width=1.0):
    """Gaussian envelope, optionally modulated to a frequency center."""
    x = grid.space_points()
    c = np.zeros(grid.d) if center is None else np.asarray(center, dtype=float)
    vals = np.exp(-np.sum((x - c) ** 2, axis=-1) / (2.0 * width ** 2))
    if freq_center is not None:
        xi0 = np.asarray(freq_center, dtype=float)
        vals = vals * np.exp(2j * np.pi * (x @ xi0))
    return space_grid_function(grid, vals.reshape(grid.shape))


def bump_in_ball(grid, center, radius, shrink=0.5, normalize=True):
    """Frequency-side smooth bump supported in an open ball."""
    xi = grid.freq_points()
    gauge = np.linalg.norm(xi - np.asarray(center, dtype=float), axis=-1) / radius
    vals = plateau(gauge, shrink).reshape(grid.shape).astype(complex)
    f = freq_grid_function(grid, vals)
    if normalize:
        n = f.norm_l2()
        if n == 0:
            raise ArgumentError("bump support does not meet the frequency grid")
        f = f.scaled(1.0 / n)
    return f


def bump_in_shape(grid, shape, shrink=0.5, normalize=True):
    """Frequency-side bump in the largest inscribed ball of a world shape."""
    center, radius = geometry.shape_inscribed_ball(shape)
    if radius <= 0:
        raise ArgumentError("degenerate set: empty inscribed ball")
    return bump_in_ball(grid, center, radius, shrink, normalize)


def random_bandlimited(grid, band, seed=0, smooth=True):
    """Random signal with frequency support in {|xi| < band}."""
    if band > grid.nyquist:
        raise ArgumentError("band exceeds the grid's Nyquist frequency")
    rng = np.random.default_rng(seed)
    noise = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    xi = grid.freq_points()
    cutoff = plateau(np.linalg.norm(xi, axis=-1) / band, 0.5 if smooth else 0.99)
    vhat = noise * cutoff.reshape(grid.shape)
    f = freq_grid_function(grid, vhat)
    n = f.norm_l2()
    return f.scaled(1.0 / n).to_space()


def signal_from_spec(spec, grid):
    """Build a signal from its JSON description."""
    kind = spec.get("kind")
    if kind == "gaussian":
        return gaussian_signal(grid, spec.get("center"), None, spec.get("width", 1.0))
    if kind == "modulatedGaussian":
        return gaussian_signal(grid, spec.get("center"), spec.get("freqCenter"),
                               spec.get("width", 1.0))
    if kind == "coveringBump":
        return bump_in_ball(grid, spec["center"], spec["radius"],
                            spec.get("shrink", 0.5))
    if kind == "randomBandlimited":
        return random_bandlimited(grid, spec["band"], spec.get("seed", 0))
    raise ArgumentError(f"unknown signal kind {kind!r}")


def save_signal(path, f):
    """Raw dump: little-endian complex64 pairs, row-major."""
    f.values.astype("<c8").tofile(path)


def load_signal(path, grid, domain="space"):
    data = np.fromfile(path, dtype="<c8")
    if data.size != grid.N ** grid.d:
        raise ArgumentError("signal file size does not match the grid")
    return GridFunction(data.reshape(grid.shape).astype(complex), domain, grid)
