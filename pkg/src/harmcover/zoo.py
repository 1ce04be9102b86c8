"""The concrete covering families and their weight families.

Four families are provided: the uniform covering (unit boxes on the integer
lattice), the inhomogeneous dyadic covering (a center ball plus doubling
annuli), the ball coverings whose set sizes scale like (1+|xi|)^alpha, and
the shear-induced covering of the punctured plane.  Infinite families are
represented by truncations carrying generator metadata so constants can be
re-derived at larger truncations for stability checks.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import covering as cov_mod
from . import geometry
from .covering import AffineMap, Covering, CoveringSet, Region
from .errors import ArgumentError
from .wavelet_group import element_for_label, well_spread_family


@dataclass
class WeightFamily:
    """Positive weight per covering label plus its symbolic generator."""

    values: dict
    generator: dict

    def __post_init__(self):
        for lab, v in self.values.items():
            if not (np.isfinite(v) and v > 0):
                raise ArgumentError(f"weight at label {lab!r} must be positive finite")

    def __getitem__(self, label):
        try:
            return self.values[tuple(label)]
        except KeyError:
            raise ArgumentError(f"weight family has no value at label {label!r}") from None

    def __contains__(self, label):
        return tuple(label) in self.values


@dataclass
class AlphaCoveringParams:
    alpha: float
    d: int
    r: float = 1.2
    truncation_radius: int = 64

    @property
    def alpha0(self):
        return self.alpha / (1.0 - self.alpha)


# ---------------------------------------------------------------------------
# uniform
# ---------------------------------------------------------------------------


def _integer_labels(d, trunc, drop_zero=False):
    out = list(itertools.product(range(-trunc, trunc + 1), repeat=d))
    if drop_zero:
        out = [k for k in out if any(v != 0 for v in k)]
    return out


def _uniform_oracle(_params):
    def oracle(ki, kj):
        return max(abs(a - b) for a, b in zip(ki, kj)) <= 1
    return oracle


def make_uniform(d, trunc=16):
    """Unit-lattice covering: Q_k = k + (-1, 1)^d for integer labels k."""
    if d < 1:
        raise ArgumentError("dimension must be >= 1")
    base = geometry.Box(-np.ones(d), np.ones(d))
    eye = np.eye(d)
    sets = [CoveringSet(k, AffineMap(eye, np.array(k, dtype=float)), 0)
            for k in _integer_labels(d, trunc)]
    meta = {"family": "uniform", "params": {"d": d}, "radius": trunc}
    return Covering(d, [base], sets, Region("full"), "uniform",
                    _uniform_oracle(meta), meta)


# ---------------------------------------------------------------------------
# dyadic
# ---------------------------------------------------------------------------


def _dyadic_oracle(_params):
    def oracle(ni, nj):
        return abs(ni[0] - nj[0]) <= 1
    return oracle


def make_dyadic(d, n_max=8):
    """Inhomogeneous dyadic covering: ball |xi| < 2 plus annuli 2^{n-1} < |xi| < 2^{n+1}."""
    if d < 1 or n_max < 1:
        raise ArgumentError("need d >= 1 and n_max >= 1")
    ball = geometry.Ball(np.zeros(d), 2.0)
    shell = geometry.RadialShell(0.5, 2.0, d)
    eye = np.eye(d)
    zero = np.zeros(d)
    sets = [CoveringSet((0,), AffineMap(eye, zero), 0)]
    for n in range(1, n_max + 1):
        sets.append(CoveringSet((n,), AffineMap((2.0 ** n) * eye, zero), 1))
    meta = {"family": "dyadic", "params": {"d": d}, "radius": n_max}
    return Covering(d, [ball, shell], sets, Region("full"), "dyadic",
                    _dyadic_oracle(meta), meta)


# ---------------------------------------------------------------------------
# alpha coverings
# ---------------------------------------------------------------------------


def _alpha_center_radius(label, alpha0, r):
    k = np.array(label, dtype=float)
    kn = float(np.linalg.norm(k))
    scale = kn ** alpha0 if kn > 0 else 1.0
    return scale * k, r * scale


def _alpha_oracle(params):
    alpha0, r = params["alpha0"], params["r"]

    def oracle(ki, kj):
        ci, ri = _alpha_center_radius(ki, alpha0, r)
        cj, rj = _alpha_center_radius(kj, alpha0, r)
        return float(np.linalg.norm(ci - cj)) < ri + rj

    return oracle


def default_alpha_grid(d, rmin=0.5, rmax=50.0, n=4096, seed=0):
    """Default verification samples for the auto radius: rmin <= |xi| <= rmax."""
    return cov_mod.annulus_samples(rmin, rmax, n, d, seed)


def _alpha_coverage_ok(params, r, pts):
    alpha0 = params.alpha0
    labels = sorted(_integer_labels(params.d, params.truncation_radius, drop_zero=True),
                    key=lambda k: np.linalg.norm(k))
    covered = np.zeros(pts.shape[0], dtype=bool)
    for k in labels:
        c, rad = _alpha_center_radius(k, alpha0, r)
        covered |= np.linalg.norm(pts - c, axis=1) < rad
        if covered.all():
            return True
    return bool(covered.all())


def make_alpha(params, r_mode="fixed", verification_points=None, safety=1.1):
    """Ball covering with centers |k|^{alpha0} k and radii r |k|^{alpha0}.

    ``r_mode='auto'`` binary-searches the least radius whose truncation covers
    the verification grid, then multiplies by the safety factor.  alpha = 1
    is rejected: that limit is the dyadic covering (make_dyadic).
    """
    if not 0.0 <= params.alpha < 1.0:
        if params.alpha == 1.0:
            raise ArgumentError("alpha = 1 is the dyadic limit; use make_dyadic")
        raise ArgumentError("alpha must lie in [0, 1)")
    alpha0 = params.alpha0
    r = params.r
    if r_mode == "auto":
        pts = (verification_points if verification_points is not None
               else default_alpha_grid(params.d))
        lo, hi = 1e-3, 1.0
        while not _alpha_coverage_ok(params, hi, pts):
            hi *= 2.0
            if hi > 1e6:
                raise ArgumentError("auto radius search failed: truncation too small")
        for _ in range(48):
            mid = 0.5 * (lo + hi)
            if _alpha_coverage_ok(params, mid, pts):
                hi = mid
            else:
                lo = mid
        r = hi * safety
    elif r_mode != "fixed":
        raise ArgumentError("r_mode must be 'fixed' or 'auto'")
    base = geometry.Ball(np.zeros(params.d), 1.0)
    eye = np.eye(params.d)
    sets = []
    for k in _integer_labels(params.d, params.truncation_radius, drop_zero=True):
        center, radius = _alpha_center_radius(k, alpha0, r)
        sets.append(CoveringSet(k, AffineMap(radius * eye, center), 0))
    meta = {"family": "alpha",
            "params": {"d": params.d, "alpha": params.alpha, "alpha0": alpha0, "r": r},
            "radius": params.truncation_radius}
    return Covering(params.d, [base], sets, Region("full"), "alphaBall",
                    _alpha_oracle(meta["params"]), meta)


# ---------------------------------------------------------------------------
# shearlet-induced covering
# ---------------------------------------------------------------------------


@dataclass
class ShearletBaseParams:
    """Trapezoid-pair base set around the xi_1 axis.

    The right piece is {u0 < xi_1 < u1, |xi_2| < w xi_1}; the left piece is
    its mirror image.  Defaults widen with the shear spacing so adjacent
    shears overlap.
    """

    u0: float
    u1: float
    w: float

    @staticmethod
    def default(delta):
        return ShearletBaseParams(2.0 ** -0.6, 2.0 * 2.0 ** 0.6, 1.1 * delta / 2.0)

    def base_set(self):
        if not (0 < self.u0 < self.u1) or self.w <= 0:
            raise ArgumentError("trapezoid base needs 0 < u0 < u1 and w > 0")
        right = geometry.Polytope.from_vertices([
            (self.u0, -self.w * self.u0), (self.u1, -self.w * self.u1),
            (self.u1, self.w * self.u1), (self.u0, self.w * self.u0)])
        left = geometry.Polytope.from_vertices([(-x, -y) for x, y in
                                                right.vertices])
        return geometry.UnionSet((right, left))

    def widened(self, factor=1.15):
        return ShearletBaseParams(self.u0 / factor, self.u1 * factor, self.w * factor)


def shearlet_ranges_for_box(c, delta, extent, margin):
    """(j_range, k_range) so the induced covering reaches the box [-extent, extent]^2
    down to the blind-spot margin."""
    q = ShearletBaseParams.default(delta)
    j_hi = int(math.ceil(math.log2(q.u0 / margin)))
    j_lo = -int(math.ceil(math.log2(max(extent / q.u1, 1.0)))) - 1
    k_needed = 1
    for j in range(j_lo, j_hi + 1):
        step = delta * 2.0 ** (j * (1.0 - c))
        slope_reach = extent / max(margin, 2.0 ** (-j) * q.u0)
        k_needed = max(k_needed, int(math.ceil(slope_reach / step)) + 1)
    return (j_lo, j_hi), k_needed


def make_shearlet_induced(c, delta=1.0, j_range=(-2, 3), k_range=None,
                          q_params=None, auto_widen=True,
                          verify_box=4.0, margin=0.1, n_check=64, seed=0):
    """Covering of the punctured plane by h^{-T} Q over the well-spread family.

    ``Q`` is the trapezoid-pair base; when ``auto_widen`` is set, the base is
    widened until a coverage check on the verification box (minus the
    blind-spot margin strip) passes.  ``k_range=None`` derives the shear
    truncation from the box and margin.
    """
    if not 0 < c <= 1:
        raise ArgumentError("anisotropy c must lie in (0, 1]")
    q = q_params if q_params is not None else ShearletBaseParams.default(delta)
    if k_range is None:
        _, k_range = shearlet_ranges_for_box(c, delta, verify_box, margin)
    labels, elements = well_spread_family(c, delta, j_range, k_range, validate=False)

    def build(qp):
        base = qp.base_set()
        sets = [CoveringSet(lab, AffineMap(elements[lab].inv_transpose(),
                                           np.zeros(2)), 0)
                for lab in labels]
        meta = {"family": "shearlet",
                "params": {"c": c, "delta": delta,
                           "jRange": list(j_range), "kRange": int(k_range),
                           "u0": qp.u0, "u1": qp.u1, "w": qp.w},
                "radius": max(abs(j_range[0]), abs(j_range[1]))}
        return Covering(2, [base], sets, Region("punctured_plane"), None, None, meta)

    if not auto_widen:
        return build(q)
    pts = _punctured_box_samples(verify_box, margin, n_check, seed)
    for _ in range(8):
        cov = build(q)
        rep = cov_mod.verify_covering(cov, pts)
        if rep.coverage_fraction == 1.0:
            return cov
        q = q.widened()
    raise ArgumentError("shearlet base widening failed to reach full coverage; "
                        "enlarge j_range/k_range")


def _punctured_box_samples(extent, margin, n, seed):
    pts = cov_mod.uniform_box_samples([-extent, -extent], [extent, extent], n)
    rng = np.random.default_rng(seed)
    pts = pts + rng.uniform(-extent / (2 * n), extent / (2 * n), size=pts.shape)
    return pts[np.abs(pts[:, 0]) >= margin]


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------


def make_weight(spec, cov):
    """Weight family over the covering's labels from a generator description.

    alphaPower(gamma): (1 + |k|)^gamma on integer labels.
    dyadicPower(s):    2^{n s} on dyadic scale labels.
    coorbit(q, m):     |det h|^{1/2 - 1/q} m(h) on shear labels, with
                       m(h) = |h^{-1}|^alpha |det h|^beta.
    constant(v), detT: fixed value / |det T_i| per set.
    """
    gen = spec["generator"]
    values = {}
    if gen == "alphaPower":
        gamma = float(spec["gamma"])
        for s in cov.sets:
            values[s.label] = (1.0 + float(np.linalg.norm(s.label))) ** gamma
    elif gen == "dyadicPower":
        s_exp = float(spec["s"])
        for s in cov.sets:
            values[s.label] = 2.0 ** (s.label[0] * s_exp)
    elif gen == "coorbit":
        if cov.truncation is None or cov.truncation.get("family") != "shearlet":
            raise ArgumentError("coorbit weights need a shearlet-induced covering")
        prm = cov.truncation["params"]
        q = float(spec["q"])
        alpha = float(spec.get("alpha", 0.0))
        beta = float(spec.get("beta", 0.0))
        for s in cov.sets:
            h = element_for_label(s.label, prm["c"], prm["delta"])
            m = (float(np.linalg.norm(np.linalg.inv(h.matrix()), 2)) ** alpha
                 * h.det() ** beta)
            values[s.label] = h.det() ** (0.5 - (0.0 if q == np.inf else 1.0 / q)) * m
    elif gen == "constant":
        v = float(spec.get("value", 1.0))
        for s in cov.sets:
            values[s.label] = v
    elif gen == "detT":
        for s in cov.sets:
            values[s.label] = abs(s.map.det)
    else:
        raise ArgumentError(f"unknown weight generator {gen!r}")
    return WeightFamily(values, dict(spec))


# ---------------------------------------------------------------------------
# rebuilding truncations (stability checks) and oracle registry
# ---------------------------------------------------------------------------


def rebuild_at(cov, radius):
    """Rebuild the same covering family at another truncation radius."""
    if cov.truncation is None:
        raise ArgumentError("covering carries no truncation metadata")
    fam = cov.truncation["family"]
    prm = cov.truncation["params"]
    if fam == "uniform":
        return make_uniform(prm["d"], int(radius))
    if fam == "dyadic":
        return make_dyadic(prm["d"], int(radius))
    if fam == "alpha":
        p = AlphaCoveringParams(prm["alpha"], prm["d"], prm["r"], int(radius))
        return make_alpha(p, r_mode="fixed")
    if fam == "shearlet":
        j = int(radius)
        return make_shearlet_induced(prm["c"], prm["delta"], (-j, j),
                                     prm["kRange"],
                                     ShearletBaseParams(prm["u0"], prm["u1"], prm["w"]),
                                     auto_widen=False)
    raise ArgumentError(f"unknown covering family {fam!r}")


cov_mod.register_oracle("uniform", _uniform_oracle)
cov_mod.register_oracle("dyadic", _dyadic_oracle)
cov_mod.register_oracle("alphaBall", lambda meta: _alpha_oracle(meta["params"]))
