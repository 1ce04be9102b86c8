"""Dyadic-cube analysis/synthesis with self-dual window systems.

Cubes are Q_{nu,k} with side 2^{-nu} <= 1 and corner 2^{-nu} k; the atoms are
the L^2-normalized translates-dilates phi_Q(x) = 2^{nu d/2} phi(2^nu x - k).
Analysis evaluates all inner products of one scale with a single inverse
transform; synthesis accumulates per-scale Dirac trains against the dual
atoms.

Window bookkeeping uses the angular frequency variable omega (the e^{-i
omega x} pairing): the cutoffs live on {|omega| <= 2} and {1/2 <= |omega| <=
2}, which together with translate spacing 2^{-nu} makes the sampled
reconstruction exact for band-limited signals.  On the grid's ordinary
frequency axis xi this means evaluating windows at omega = 2 pi 2^{-nu} xi;
a scale-nu window then occupies |xi| <= 2^{nu+1} / (2 pi).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, ResolutionError
from .exponents import lq_norm
from .grid import GridFunction
from .profiles import radial_cutoff

IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class DyadicCube:
    nu: int
    k: tuple

    def __post_init__(self):
        if self.nu < 0:
            raise ArgumentError("cubes have side <= 1, i.e. nu >= 0")

    @property
    def side(self):
        return 2.0 ** -self.nu

    @property
    def corner(self):
        return tuple(2.0 ** -self.nu * ki for ki in self.k)


class WindowSystem:
    """Radial self-dual windows: sqrt of a telescoping smooth cutoff.

    theta is 1 on {|omega| <= 1} and supported in {|omega| < 2}; the
    low-pass window is sqrt(theta) and the band window sqrt(theta - theta(2.)),
    so the mixed products telescope to 1 exactly on {|omega| <= 2^nu_max}.
    """

    def __init__(self, grid, profile="exp_recip", nu_max=None):
        self.grid = grid
        self.profile = profile
        cap = max_scale(grid)
        if nu_max is None:
            nu_max = cap
        if nu_max > cap:
            raise ResolutionError(
                f"grid resolves scales up to nu = {cap}, requested {nu_max}")
        self.nu_max = int(nu_max)
        band = math.pi * grid.N / grid.L
        if band < 2.0 ** (self.nu_max + 1):
            raise ResolutionError("grid band does not cover the top window scale")
        # sampled window system on the grid's frequency points
        self.low_hat = self._sample(0)
        self.band_hats = {nu: self._sample(nu) for nu in range(1, self.nu_max + 1)}
        self._check_identity()

    # window callables in the angular variable ------------------------------

    def theta(self, rho):
        return radial_cutoff(rho, self.profile)

    def low_window(self, omega_norm):
        return np.sqrt(self.theta(omega_norm))

    def band_window(self, omega_norm):
        d = self.theta(omega_norm) - self.theta(2.0 * omega_norm)
        return np.sqrt(np.maximum(d, 0.0))

    def _sample(self, nu):
        xi = self.grid.freq_points()
        omega = 2.0 * math.pi * np.linalg.norm(xi, axis=-1)
        vals = (self.low_window(omega) if nu == 0
                else self.band_window(2.0 ** -nu * omega))
        return vals.reshape(self.grid.shape)

    def window_grid_function(self, nu):
        vals = self.low_hat if nu == 0 else self.band_hats[nu]
        return GridFunction(vals.astype(complex), "frequency", self.grid)

    # the four windows as grid functions; the system is self-dual
    @property
    def phi0_hat(self):
        return self.window_grid_function(0)

    psi0_hat = phi0_hat

    @property
    def phi_hat(self):
        xi = self.grid.freq_points()
        omega = 2.0 * math.pi * np.linalg.norm(xi, axis=-1)
        vals = self.band_window(omega).reshape(self.grid.shape)
        return GridFunction(vals.astype(complex), "frequency", self.grid)

    psi_hat = phi_hat

    def _check_identity(self):
        total = self.low_hat ** 2
        for nu in range(1, self.nu_max + 1):
            total = total + self.band_hats[nu] ** 2
        xi = self.grid.freq_points()
        omega = 2.0 * math.pi * np.linalg.norm(xi, axis=-1).reshape(self.grid.shape)
        in_band = omega <= 2.0 ** self.nu_max
        self.identity_residual = float(np.max(np.abs(total[in_band] - 1.0)))
        if self.identity_residual >= IDENTITY_TOL:
            raise ResolutionError(
                f"window identity residual {self.identity_residual:g} exceeds 1e-12")


def max_scale(grid):
    """Largest nu with translate spacing 2^{-nu} on the grid and windows in band."""
    by_stride = int(math.floor(math.log2(grid.N / grid.L)))
    by_band = int(math.floor(math.log2(math.pi * grid.N / grid.L))) - 1
    return min(by_stride, by_band)


def signal_band_angular(nu_max):
    """Ordinary-frequency radius reproduced exactly by scales <= nu_max."""
    return 2.0 ** nu_max / (2.0 * math.pi)


class CubeCoefficients:
    """Per-scale coefficient arrays over the periodic box.

    Scale nu holds an array of shape (L 2^nu,)^d indexed by m, with cube
    label k = m - L 2^nu / 2 per axis (corners 2^{-nu} k tile the box).
    """

    def __init__(self, grid, nu_max, per_scale):
        self.grid = grid
        self.nu_max = nu_max
        self.per_scale = per_scale  # nu -> complex ndarray

    def counts(self, nu):
        return self.per_scale[nu].shape[0]

    def label_offset(self, nu):
        return self.per_scale[nu].shape[0] // 2

    def value(self, cube):
        arr = self.per_scale[cube.nu]
        off = self.label_offset(cube.nu)
        idx = tuple(ki + off for ki in cube.k)
        if any(not 0 <= t < arr.shape[0] for t in idx):
            raise ArgumentError(f"cube {cube} outside the coefficient box")
        return arr[idx]

    def copy_scaled(self, factor):
        return CubeCoefficients(self.grid, self.nu_max,
                                {nu: a * factor for nu, a in self.per_scale.items()})

    @staticmethod
    def zeros(grid, nu_max):
        per_scale = {}
        for nu in range(nu_max + 1):
            m = _translates_per_axis(grid, nu)
            per_scale[nu] = np.zeros((m,) * grid.d, dtype=complex)
        return CubeCoefficients(grid, nu_max, per_scale)

    def iter_items(self):
        for nu, arr in self.per_scale.items():
            off = self.label_offset(nu)
            for idx in np.ndindex(arr.shape):
                yield DyadicCube(nu, tuple(t - off for t in idx)), arr[idx]


def _translates_per_axis(grid, nu):
    m = grid.L * 2 ** nu
    if abs(m - round(m)) > 1e-9:
        raise ResolutionError(
            f"translate lattice at scale {nu} does not align with the grid")
    return int(round(m))


def _stride(grid, nu):
    s = grid.N / (grid.L * 2 ** nu)
    if abs(s - round(s)) > 1e-9 or round(s) < 1:
        raise ResolutionError(
            f"scale {nu} translates are finer than the spatial grid")
    return int(round(s))


def analyze(f, windows, nu_max=None):
    """All cube coefficients <f, phi_Q> up to the cutoff scale.

    One frequency product and one inverse transform per scale produce the
    inner products of every translate simultaneously; the scale-nu samples
    are read off the spatial grid at stride N / (L 2^nu).
    """
    if nu_max is None:
        nu_max = windows.nu_max
    if nu_max > windows.nu_max:
        raise ResolutionError("nu_max beyond the window system's resolution")
    grid = f.grid
    fhat = f.to_frequency()
    per_scale = {}
    for nu in range(nu_max + 1):
        w = windows.low_hat if nu == 0 else windows.band_hats[nu]
        g = GridFunction(fhat.values * np.conj(w), "frequency", grid).to_space()
        s = _stride(grid, nu)
        sub = g.values[tuple(slice(None, None, s) for _ in range(grid.d))]
        per_scale[nu] = 2.0 ** (-nu * grid.d / 2.0) * sub.copy()
    return CubeCoefficients(grid, nu_max, per_scale)


def synthesize(coeffs, windows):
    """Sum of coefficient-weighted dual atoms, accumulated per scale."""
    grid = coeffs.grid
    out_hat = np.zeros(grid.shape, dtype=complex)
    for nu, arr in coeffs.per_scale.items():
        if nu > windows.nu_max:
            raise ResolutionError("coefficients exceed the window system's scales")
        s = _stride(grid, nu)
        imp = np.zeros(grid.shape, dtype=complex)
        imp[tuple(slice(None, None, s) for _ in range(grid.d))] = arr
        train = np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(imp)))
        w = windows.low_hat if nu == 0 else windows.band_hats[nu]
        out_hat += 2.0 ** (-nu * grid.d / 2.0) * w * train
    return GridFunction(out_hat, "frequency", grid).to_space()


def roundtrip_error(f, windows, nu_max=None):
    """Relative L^2 error of synthesize(analyze(f))."""
    rec = synthesize(analyze(f, windows, nu_max), windows)
    fs = f.to_space()
    return float(np.linalg.norm(rec.values - fs.values)
                 / np.linalg.norm(fs.values))


# ---------------------------------------------------------------------------
# sequence norms
# ---------------------------------------------------------------------------


def sequence_norm(coeffs, kind, s, p, q, grid=None):
    """Smoothness-weighted size of a coefficient family.

    kind 'b': per-scale ell^p with weight side^{d(1/p - 1/2) - s}, outer
    ell^q over scales.  kind 'f': pointwise ell^q over the cubes containing
    each grid point of side^{-s} |c_Q| vol(Q)^{-1/2}, then a Riemann L^p over
    the spatial grid (p = inf is not a Lebesgue aggregate and is rejected).
    """
    if grid is None:
        grid = coeffs.grid
    d = grid.d
    if kind == "b":
        per_scale = []
        for nu in sorted(coeffs.per_scale):
            side = 2.0 ** -nu
            weight = side ** (d * (1.0 / p - 0.5) - s) if p != np.inf \
                else side ** (d * (0.0 - 0.5) - s)
            arr = np.abs(coeffs.per_scale[nu]).ravel()
            per_scale.append(weight * lq_norm(arr, p))
        return lq_norm(per_scale, q)
    if kind == "f":
        if p == np.inf:
            raise ArgumentError("pointwise-aggregate norms require p < inf")
        stacks = []
        for nu in sorted(coeffs.per_scale):
            side = 2.0 ** -nu
            reps = _stride(grid, nu)
            if reps < 4:
                raise ResolutionError(
                    f"scale {nu} cubes hold fewer than 4^d grid points")
            arr = np.abs(coeffs.per_scale[nu])
            expanded = arr
            for ax in range(d):
                expanded = np.repeat(expanded, reps, axis=ax)
            stacks.append(side ** (-s) * side ** (-d / 2.0) * expanded)
        pointwise = lq_pointwise(np.stack(stacks), q)
        return float((np.sum(pointwise ** p) * grid.dx ** d) ** (1.0 / p))
    raise ArgumentError("kind must be 'b' or 'f'")


def lq_pointwise(stack, q):
    if q == np.inf:
        return stack.max(axis=0)
    return (stack ** q).sum(axis=0) ** (1.0 / q)
