"""Partitions of unity on the frequency grid and decomposition-space norms.

A partition subordinate to a covering is built by pulling a smooth plateau
profile through each set's affine map and normalizing by the pointwise sum,
so the partition property holds by construction wherever the truncation
covers the grid.  Norms aggregate the L^p sizes of the frequency-localized
pieces in a weighted ell^q, and witness families provide per-set test bumps
for confirming or falsifying embedding verdicts numerically.
"""

import numpy as np

from . import geometry
from .errors import ArgumentError, CoverageError, ResolutionError
from .exponents import lq_norm
from .grid import GridFunction, bump_in_ball

PARTITION_TOL = 1e-10


class BAPUFamily:
    """Per-index frequency-domain pieces phi_i stored on support boxes."""

    def __init__(self, covering, grid, pieces, shrink, profile):
        self.covering = covering
        self.grid = grid
        self.pieces = pieces  # label -> (slices, real values on the subgrid)
        self.shrink = shrink
        self.profile = profile

    def labels(self):
        return list(self.pieces)

    def piece_full(self, label):
        """The piece embedded into a full grid array."""
        slices, vals = self.pieces[tuple(label)]
        out = np.zeros(self.grid.shape)
        out[slices] = vals
        return out

    def piece_function(self, label):
        return GridFunction(self.piece_full(label).astype(complex),
                            "frequency", self.grid)

    def partition_sum(self):
        out = np.zeros(self.grid.shape)
        for slices, vals in self.pieces.values():
            out[slices] += vals
        return out

    def region_mask(self):
        g = self.grid
        return self.covering.region.contains(g.freq_points()).reshape(g.shape)


def _support_slices(grid, shape):
    lo, hi = geometry.shape_bounding_box(shape)
    axis = grid.freq_axis()
    out = []
    for a in range(grid.d):
        i0 = int(np.searchsorted(axis, lo[a] - grid.dxi, side="left"))
        i1 = int(np.searchsorted(axis, hi[a] + grid.dxi, side="right"))
        i0, i1 = max(0, i0), min(grid.N, i1)
        if i1 <= i0:
            return None
        out.append(slice(i0, i1))
    return tuple(out)


def build_bapu(cov, grid, shrink=0.7, profile="exp_recip", region_margin=0.0):
    """Smooth partition of unity subordinate to the covering, on the grid.

    Each raw bump equals 1 on the shrink-scaled copy of its set (in base
    coordinates) and vanishes on the boundary; normalization by the pointwise
    sum enforces the partition property on grid points inside the region, and
    raises a coverage error naming any region point the truncation misses.
    ``region_margin`` excludes a strip of that width around the region's
    blind spot from the coverage requirement (and from the pieces).
    """
    if grid.d != cov.dim:
        raise ArgumentError("grid and covering dimension mismatch")
    axis = grid.freq_axis()
    mesh = np.meshgrid(*([axis] * grid.d), indexing="ij")
    raw = {}
    denom = np.zeros(grid.shape)
    for i, s in enumerate(cov.sets):
        slices = _support_slices(grid, cov.shape(i))
        if slices is None:
            continue
        sub = np.stack([m[slices].ravel() for m in mesh], axis=-1)
        local = s.map.pullback(sub)
        g = geometry.bump_values(cov.base_sets[s.base], local, shrink, profile)
        shape_sub = tuple(sl.stop - sl.start for sl in slices)
        g = g.reshape(shape_sub)
        if not np.any(g > 0):
            continue
        raw[s.label] = (slices, g)
        denom[slices] += g
    region = cov.region.contains(grid.freq_points()).reshape(grid.shape)
    if region_margin > 0.0:
        if cov.region.kind == "punctured_plane":
            ax = cov.region.params.get("axis", 0)
            coord = mesh[ax]
            region &= np.abs(coord) >= region_margin
        else:
            raise ArgumentError("region_margin applies to punctured regions only")
    uncovered = region & (denom <= 0)
    if np.any(uncovered):
        idx = np.argwhere(uncovered)[0]
        pt = np.array([axis[t] for t in idx])
        raise CoverageError(
            f"grid point {pt.tolist()} lies in the region but in no covering set")
    pieces = {}
    for label, (slices, g) in raw.items():
        vals = np.zeros_like(g)
        ok = denom[slices] > 0
        vals[ok] = g[ok] / denom[slices][ok]
        vals[~region[slices]] = 0.0
        pieces[label] = (slices, vals)
    return BAPUFamily(cov, grid, pieces, shrink, profile)


def piece_norms(f, cov, bapu, p):
    """(label, L^p norm of the inverse transform of phi_i * fhat) per index."""
    fhat = f.to_frequency()
    grid = fhat.grid
    out = {}
    for label, (slices, vals) in bapu.pieces.items():
        prod_sub = vals * fhat.values[slices]
        if not np.any(prod_sub):
            out[label] = 0.0
            continue
        full = np.zeros(grid.shape, dtype=complex)
        full[slices] = prod_sub
        piece = GridFunction(full, "frequency", grid).to_space()
        out[label] = piece.norm_lp(p)
    return out


def decomposition_norm(f, cov, bapu, p, q, u):
    """Weighted ell^q aggregate of the L^p norms of the localized pieces."""
    norms = piece_norms(f, cov, bapu, p)
    terms = []
    for label, a in norms.items():
        if a == 0.0:
            continue
        if label not in u:
            raise ArgumentError(f"weight missing on index {label!r} with nonzero piece")
        terms.append(u[label] * a)
    return lq_norm(terms, q)


def inverse_transform_l1_norms(bapu):
    """Discrete |F^{-1} phi_i|_{L^1} per label (boundedness diagnostics)."""
    out = {}
    for label in bapu.labels():
        out[label] = bapu.piece_function(label).to_space().norm_lp(1)
    return out


def witness_family(cov, index_chain, grid, shrink=0.5):
    """L^2-normalized frequency bumps in the inscribed balls of chain sets."""
    witnesses = []
    nyq = grid.nyquist
    for label in index_chain:
        i = cov.position(label)
        center, radius = geometry.shape_inscribed_ball(cov.shape(i))
        if radius <= 0:
            raise ArgumentError(f"degenerate set at label {label!r}: empty inscribed ball")
        if np.any(np.abs(center) + radius > nyq * np.sqrt(grid.d)):
            raise ResolutionError(
                f"set at label {label!r} does not fit the grid band")
        if radius < grid.dxi:
            raise ResolutionError(
                f"set at label {label!r} is unresolved on the grid")
        witnesses.append(bump_in_ball(grid, center, radius, shrink))
    return witnesses


def witness_norm_ratios(witnesses, source, target):
    """Per-witness ratio target-norm / source-norm.

    ``source`` and ``target`` are (covering, bapu, p, q, weight) tuples.
    """
    out = []
    for f in witnesses:
        s = decomposition_norm(f, source[0], source[1], source[2], source[3], source[4])
        t = decomposition_norm(f, target[0], target[1], target[2], target[3], target[4])
        out.append(t / s)
    return np.array(out)
