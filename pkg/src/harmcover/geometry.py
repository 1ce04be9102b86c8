"""Open set primitives: base-set variants, affine images, intersection tests.

Base sets come in five variants (ball, box, polytope, radial shell, finite
union).  Covering sets are affine images ``T S + b`` of base sets; for
intersection purposes every image is normalized to a "world shape".  Balls,
boxes and shells only ever appear with scalar maps ``T = s*I`` in this
package, so the world-shape vocabulary is closed: ball, box, shell,
polytope (2D), union.

Pairwise intersection is decided by exact arithmetic per shape pair where a
closed form exists (strict open-overlap), with a conservative alternating-
projection fallback for convex pairs lacking one.  The fallback classifies
near-tangent pairs (separation below GEO_TOL) as intersecting, which can
only enlarge neighbor counts.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .config import GEO_TOL
from .errors import ArgumentError
from .profiles import plateau


def _as_vec(x, d):
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.shape != (d,):
        raise ArgumentError(f"expected vector of dimension {d}, got shape {v.shape}")
    return v


# ---------------------------------------------------------------------------
# base sets (open, bounded, nonempty)
# ---------------------------------------------------------------------------


class BaseSet:
    """Common interface for the open base-set variants."""

    dim: int

    def contains(self, pts):
        """Strict interior membership for an (n, d) array of points."""
        raise NotImplementedError

    def bounding_box(self):
        raise NotImplementedError

    def gauge(self, pts):
        """Normalized gauge: < 1 strictly inside, >= 1 outside or on boundary."""
        raise NotImplementedError

    def inscribed_ball(self):
        """(center, radius) of a large ball inside the set (one component)."""
        raise NotImplementedError

    def sample_points(self, n_per_axis=16, margin=GEO_TOL):
        """Points strictly inside the set: grid over the bounding box, filtered."""
        lo, hi = self.bounding_box()
        axes = [np.linspace(lo[a], hi[a], n_per_axis + 2)[1:-1] for a in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        keep = self.gauge(pts) < 1.0 - margin
        return pts[keep]

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Ball(BaseSet):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.atleast_1d(np.asarray(self.center, float)))
        if not self.radius > 0:
            raise ArgumentError("ball radius must be positive")

    @property
    def dim(self):
        return self.center.shape[0]

    def contains(self, pts):
        return np.linalg.norm(pts - self.center, axis=-1) < self.radius

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def gauge(self, pts):
        return np.linalg.norm(pts - self.center, axis=-1) / self.radius

    def inscribed_ball(self):
        return self.center.copy(), self.radius

    def to_json(self):
        return {"type": "ball", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True)
class Box(BaseSet):
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", np.atleast_1d(np.asarray(self.lo, float)))
        object.__setattr__(self, "hi", np.atleast_1d(np.asarray(self.hi, float)))
        if not np.all(self.hi > self.lo):
            raise ArgumentError("box must have positive extent on every axis")

    @property
    def dim(self):
        return self.lo.shape[0]

    def contains(self, pts):
        return np.all((pts > self.lo) & (pts < self.hi), axis=-1)

    def bounding_box(self):
        return self.lo.copy(), self.hi.copy()

    def gauge(self, pts):
        mid = 0.5 * (self.lo + self.hi)
        half = 0.5 * (self.hi - self.lo)
        return np.max(np.abs(pts - mid) / half, axis=-1)

    def inscribed_ball(self):
        mid = 0.5 * (self.lo + self.hi)
        return mid, float(np.min(0.5 * (self.hi - self.lo)))

    def to_json(self):
        return {"type": "box", "lo": self.lo.tolist(), "hi": self.hi.tolist()}


@dataclass(frozen=True)
class RadialShell(BaseSet):
    """Open annulus {r1 < |x| < r2} centered at the origin."""

    r1: float
    r2: float
    d: int = 1

    def __post_init__(self):
        if not 0 < self.r1 < self.r2:
            raise ArgumentError("radial shell requires 0 < r1 < r2")

    @property
    def dim(self):
        return self.d

    def contains(self, pts):
        r = np.linalg.norm(pts, axis=-1)
        return (r > self.r1) & (r < self.r2)

    def bounding_box(self):
        return -self.r2 * np.ones(self.d), self.r2 * np.ones(self.d)

    def gauge(self, pts):
        rc = 0.5 * (self.r1 + self.r2)
        half = 0.5 * (self.r2 - self.r1)
        return np.abs(np.linalg.norm(pts, axis=-1) - rc) / half

    def inscribed_ball(self):
        center = np.zeros(self.d)
        center[0] = 0.5 * (self.r1 + self.r2)
        return center, 0.5 * (self.r2 - self.r1)

    def to_json(self):
        return {"type": "radialShell", "r1": self.r1, "r2": self.r2, "dim": self.d}


@dataclass(frozen=True)
class Polytope(BaseSet):
    """Open convex polytope {x : A x < b}, stored with its vertex list (2D)."""

    A: np.ndarray
    b: np.ndarray
    vertices: np.ndarray

    @staticmethod
    def from_vertices(vertices):
        """Build from the vertices of a convex polygon (any vertex order)."""
        verts = np.asarray(vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 2 or verts.shape[0] < 3:
            raise ArgumentError("polytope construction needs >= 3 planar vertices")
        centroid = verts.mean(axis=0)
        order = np.argsort(np.arctan2(verts[:, 1] - centroid[1], verts[:, 0] - centroid[0]))
        verts = verts[order]
        rows, offs = [], []
        n = verts.shape[0]
        for i in range(n):
            p, q = verts[i], verts[(i + 1) % n]
            edge = q - p
            normal = np.array([edge[1], -edge[0]])  # outward for CCW order
            nn = np.linalg.norm(normal)
            if nn < 1e-14:
                continue
            normal = normal / nn
            if normal @ (centroid - p) > 0:
                normal = -normal
            rows.append(normal)
            offs.append(normal @ p)
        poly = Polytope(np.array(rows), np.array(offs), verts)
        if poly.chebyshev()[1] <= 0:
            raise ArgumentError("polytope is empty or degenerate")
        return poly

    @property
    def dim(self):
        return self.A.shape[1]

    def contains(self, pts):
        return np.all(pts @ self.A.T < self.b, axis=-1)

    def bounding_box(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def chebyshev(self):
        """Chebyshev center and radius via a small LP."""
        norms = np.linalg.norm(self.A, axis=1)
        d = self.dim
        c = np.zeros(d + 1)
        c[-1] = -1.0
        A_ub = np.hstack([self.A, norms[:, None]])
        res = linprog(c, A_ub=A_ub, b_ub=self.b, bounds=[(None, None)] * d + [(0, None)],
                      method="highs")
        if not res.success:
            raise ArgumentError("polytope Chebyshev LP failed")
        return res.x[:d], float(res.x[d])

    def gauge(self, pts):
        x0, _ = self.chebyshev()
        num = pts @ self.A.T - self.A @ x0
        den = self.b - self.A @ x0
        return np.max(num / den, axis=-1)

    def inscribed_ball(self):
        return self.chebyshev()

    def transformed(self, T, shift):
        """Image T * P + shift as a new polytope."""
        return Polytope.from_vertices(self.vertices @ np.asarray(T, float).T + shift)

    def to_json(self):
        return {"type": "polytope", "vertices": self.vertices.tolist()}


@dataclass(frozen=True)
class UnionSet(BaseSet):
    members: tuple

    def __post_init__(self):
        if not self.members:
            raise ArgumentError("union base set needs at least one member")
        dims = {m.dim for m in self.members}
        if len(dims) != 1:
            raise ArgumentError("union members must share dimension")

    @property
    def dim(self):
        return self.members[0].dim

    def contains(self, pts):
        out = self.members[0].contains(pts)
        for m in self.members[1:]:
            out = out | m.contains(pts)
        return out

    def bounding_box(self):
        los, his = zip(*(m.bounding_box() for m in self.members))
        return np.min(los, axis=0), np.max(his, axis=0)

    def gauge(self, pts):
        return np.min([m.gauge(pts) for m in self.members], axis=0)

    def inscribed_ball(self):
        best = max(self.members, key=lambda m: m.inscribed_ball()[1])
        return best.inscribed_ball()

    def sample_points(self, n_per_axis=16, margin=GEO_TOL):
        return np.concatenate([m.sample_points(n_per_axis, margin) for m in self.members])

    def to_json(self):
        return {"type": "union", "members": [m.to_json() for m in self.members]}


def base_set_from_json(obj):
    kind = obj["type"]
    if kind == "ball":
        return Ball(np.array(obj["center"]), obj["radius"])
    if kind == "box":
        return Box(np.array(obj["lo"]), np.array(obj["hi"]))
    if kind == "radialShell":
        return RadialShell(obj["r1"], obj["r2"], obj["dim"])
    if kind == "polytope":
        return Polytope.from_vertices(np.array(obj["vertices"]))
    if kind == "union":
        return UnionSet(tuple(base_set_from_json(m) for m in obj["members"]))
    raise ArgumentError(f"unknown base set type {kind!r}")


def bump_values(base, pts_base, shrink, profile="exp_recip"):
    """Smooth bump on base-set coordinates: 1 on the shrunk copy, 0 outside.

    For unions the member bumps are combined as 1 - prod(1 - g_m), which is
    smooth, equals 1 wherever a member bump does, and vanishes off the union.
    """
    if isinstance(base, UnionSet):
        acc = np.ones(pts_base.shape[0])
        for m in base.members:
            acc = acc * (1.0 - bump_values(m, pts_base, shrink, profile))
        return 1.0 - acc
    return plateau(base.gauge(pts_base), shrink, profile)


# ---------------------------------------------------------------------------
# world shapes (affine images, normalized)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WorldShape:
    kind: str  # ball | box | shell | poly | union
    data: tuple = field(default=())


def _is_scalar_matrix(T):
    d = T.shape[0]
    s = T[0, 0]
    return np.allclose(T, s * np.eye(d), rtol=0.0, atol=1e-13 * max(1.0, abs(s))), s


def world_shape(base, T, b):
    """Normalize the affine image T*base + b to a world shape."""
    T = np.asarray(T, dtype=float)
    b = np.asarray(b, dtype=float)
    if isinstance(base, UnionSet):
        return WorldShape("union", tuple(world_shape(m, T, b) for m in base.members))
    scalar, s = _is_scalar_matrix(T)
    if isinstance(base, Ball):
        if scalar:
            return WorldShape("ball", (s * base.center + b, abs(s) * base.radius))
    if isinstance(base, Box):
        if scalar and s > 0:
            return WorldShape("box", (s * base.lo + b, s * base.hi + b))
        if base.dim == 2:
            corners = np.array([[base.lo[0], base.lo[1]], [base.hi[0], base.lo[1]],
                                [base.hi[0], base.hi[1]], [base.lo[0], base.hi[1]]])
            return WorldShape("poly", (Polytope.from_vertices(corners @ T.T + b),))
    if isinstance(base, RadialShell):
        if scalar:
            return WorldShape("shell", (b, abs(s) * base.r1, abs(s) * base.r2, base.dim))
    if isinstance(base, Polytope):
        return WorldShape("poly", (base.transformed(T, b),))
    raise ArgumentError(
        f"no world-shape normalization for {type(base).__name__} under a non-scalar map")


def shape_bounding_box(sh):
    if sh.kind == "ball":
        c, r = sh.data
        return c - r, c + r
    if sh.kind == "box":
        return sh.data[0], sh.data[1]
    if sh.kind == "shell":
        c, _, r2, d = sh.data
        return c - r2, c + r2
    if sh.kind == "poly":
        return sh.data[0].bounding_box()
    los, his = zip(*(shape_bounding_box(m) for m in sh.data))
    return np.min(los, axis=0), np.max(his, axis=0)


def shape_contains(sh, pts):
    if sh.kind == "ball":
        c, r = sh.data
        return np.linalg.norm(pts - c, axis=-1) < r
    if sh.kind == "box":
        lo, hi = sh.data
        return np.all((pts > lo) & (pts < hi), axis=-1)
    if sh.kind == "shell":
        c, r1, r2, _ = sh.data
        rr = np.linalg.norm(pts - c, axis=-1)
        return (rr > r1) & (rr < r2)
    if sh.kind == "poly":
        return sh.data[0].contains(pts)
    out = shape_contains(sh.data[0], pts)
    for m in sh.data[1:]:
        out = out | shape_contains(m, pts)
    return out


def shape_inscribed_ball(sh):
    if sh.kind == "ball":
        return sh.data[0], sh.data[1]
    if sh.kind == "box":
        lo, hi = sh.data
        return 0.5 * (lo + hi), float(np.min(0.5 * (hi - lo)))
    if sh.kind == "shell":
        c, r1, r2, d = sh.data
        center = np.array(c, dtype=float)
        center[0] += 0.5 * (r1 + r2)
        return center, 0.5 * (r2 - r1)
    if sh.kind == "poly":
        return sh.data[0].chebyshev()
    best = max(sh.data, key=lambda m: shape_inscribed_ball(m)[1])
    return shape_inscribed_ball(best)


# --- closed-form pairwise intersection -------------------------------------


def _interval_overlap(a_lo, a_hi, b_lo, b_hi):
    return (a_lo < b_hi) & (b_lo < a_hi)


def _dist_point_box(p, lo, hi):
    return float(np.linalg.norm(np.clip(p, lo, hi) - p))


def _shell_components_1d(c, r1, r2):
    c = float(np.atleast_1d(c)[0])
    return [(c - r2, c - r1), (c + r1, c + r2)]


def _range_of_distances_box(center, lo, hi):
    near = float(np.linalg.norm(np.clip(center, lo, hi) - center))
    far_pt = np.where(np.abs(hi - center) > np.abs(lo - center), hi, lo)
    return near, float(np.linalg.norm(far_pt - center))


def _poly_point_distance(poly, p):
    if bool(poly.contains(p[None])[0]):
        return 0.0
    verts = poly.vertices
    n = verts.shape[0]
    best = np.inf
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        e = b - a
        t = np.clip(((p - a) @ e) / (e @ e), 0.0, 1.0)
        best = min(best, float(np.linalg.norm(a + t * e - p)))
    return best


def _sat_polys_intersect(p1, p2, tol=GEO_TOL):
    """Separating-axis test for two convex polygons (conservative at tangency)."""
    for poly in (p1, p2):
        verts = poly.vertices
        n = verts.shape[0]
        for i in range(n):
            edge = verts[(i + 1) % n] - verts[i]
            axis = np.array([edge[1], -edge[0]])
            nn = np.linalg.norm(axis)
            if nn < 1e-14:
                continue
            axis = axis / nn
            a = p1.vertices @ axis
            b = p2.vertices @ axis
            if a.min() - b.max() > tol or b.min() - a.max() > tol:
                return False
    return True


def _ball_shell_intersect(bc, br, sc, s1, s2, d):
    if d == 1:
        for lo, hi in _shell_components_1d(sc, s1, s2):
            if _interval_overlap(float(bc[0]) - br, float(bc[0]) + br, lo, hi):
                return True
        return False
    D = float(np.linalg.norm(np.asarray(bc) - np.asarray(sc)))
    lo, hi = max(0.0, D - br), D + br
    return lo < s2 and hi > s1


def _shell_shell_intersect(c1, a1, b1, c2, a2, b2, d):
    if d == 1:
        for lo1, hi1 in _shell_components_1d(c1, a1, b1):
            for lo2, hi2 in _shell_components_1d(c2, a2, b2):
                if _interval_overlap(lo1, hi1, lo2, hi2):
                    return True
        return False
    D = float(np.linalg.norm(np.asarray(c1) - np.asarray(c2)))
    if D < 1e-15:
        return _interval_overlap(a1, b1, a2, b2)
    # feasible (d1,d2) must satisfy |d1-d2| <= D <= d1+d2 with d1 in (a1,b1) etc.
    return (a1 - b2 < D) and (a2 - b1 < D) and (b1 + b2 > D)


def _box_shell_intersect(lo, hi, sc, s1, s2, d):
    if d == 1:
        for slo, shi in _shell_components_1d(sc, s1, s2):
            if _interval_overlap(float(lo[0]), float(hi[0]), slo, shi):
                return True
        return False
    near, far = _range_of_distances_box(np.asarray(sc, float), lo, hi)
    return near < s2 and far > s1


def _poly_shell_intersect(poly, sc, s1, s2):
    near = _poly_point_distance(poly, np.asarray(sc, float))
    far = float(np.max(np.linalg.norm(poly.vertices - np.asarray(sc), axis=1)))
    return near < s2 and far > s1


_PROJECTABLE = ("ball", "box", "poly")


def _project(sh, p):
    if sh.kind == "ball":
        c, r = sh.data
        v = p - c
        n = np.linalg.norm(v)
        if n <= r:
            return p
        return c + v * (r / n)
    if sh.kind == "box":
        lo, hi = sh.data
        return np.clip(p, lo, hi)
    if sh.kind == "poly":
        poly = sh.data[0]
        if bool(poly.contains(p[None])[0]):
            return p
        verts = poly.vertices
        n = verts.shape[0]
        best, bd = None, np.inf
        for i in range(n):
            a, b = verts[i], verts[(i + 1) % n]
            e = b - a
            t = np.clip(((p - a) @ e) / (e @ e), 0.0, 1.0)
            q = a + t * e
            dd = float(np.linalg.norm(q - p))
            if dd < bd:
                best, bd = q, dd
        return best
    raise ArgumentError(f"no projection operator for shape kind {sh.kind!r}")


def alternating_projection_distance(sh1, sh2, iters=256):
    """Approximate distance between two convex shapes by alternating projections.

    Returns (distance, certified) where ``certified`` is True once the
    iteration has stabilized; a distance above GEO_TOL then certifies
    separation (the segment between the final pair realizes a gap).
    """
    lo1, hi1 = shape_bounding_box(sh1)
    p = 0.5 * (lo1 + hi1)
    prev = np.inf
    for _ in range(iters):
        q = _project(sh2, _project(sh1, p))
        d = float(np.linalg.norm(q - _project(sh1, q)))
        if abs(prev - d) < 1e-14:
            return d, True
        prev = d
        p = q
    return prev, False


def shapes_intersect(sh1, sh2, tol=GEO_TOL):
    """Decide whether two world shapes (open sets) intersect.

    Exact strict arithmetic where a closed form exists; alternating
    projections (conservative within ``tol`` of tangency) otherwise.
    """
    if sh1.kind == "union":
        return any(shapes_intersect(m, sh2, tol) for m in sh1.data)
    if sh2.kind == "union":
        return any(shapes_intersect(sh1, m, tol) for m in sh2.data)
    # cheap reject
    lo1, hi1 = shape_bounding_box(sh1)
    lo2, hi2 = shape_bounding_box(sh2)
    if not np.all(_interval_overlap(lo1, hi1, lo2, hi2)):
        return False
    k1, k2 = sh1.kind, sh2.kind
    if k1 > k2:
        sh1, sh2, k1, k2 = sh2, sh1, k2, k1
    if (k1, k2) == ("ball", "ball"):
        (c1, r1), (c2, r2) = sh1.data, sh2.data
        return float(np.linalg.norm(c1 - c2)) < r1 + r2
    if (k1, k2) == ("ball", "box"):
        (c, r), (lo, hi) = sh1.data, sh2.data
        return _dist_point_box(c, lo, hi) < r
    if (k1, k2) == ("box", "box"):
        (lo1, hi1), (lo2, hi2) = sh1.data, sh2.data
        return bool(np.all(_interval_overlap(lo1, hi1, lo2, hi2)))
    if (k1, k2) == ("ball", "shell"):
        (c, r), (sc, s1, s2, d) = sh1.data, sh2.data
        return _ball_shell_intersect(c, r, sc, s1, s2, d)
    if (k1, k2) == ("box", "shell"):
        (lo, hi), (sc, s1, s2, d) = sh1.data, sh2.data
        return _box_shell_intersect(lo, hi, sc, s1, s2, d)
    if (k1, k2) == ("shell", "shell"):
        (c1, a1, b1, d), (c2, a2, b2, _) = sh1.data, sh2.data
        return _shell_shell_intersect(c1, a1, b1, c2, a2, b2, d)
    if (k1, k2) == ("poly", "poly"):
        return _sat_polys_intersect(sh1.data[0], sh2.data[0], tol)
    if (k1, k2) == ("ball", "poly"):
        (c, r) = sh1.data
        return _poly_point_distance(sh2.data[0], np.asarray(c, float)) < r
    if (k1, k2) == ("box", "poly"):
        lo, hi = sh1.data
        corners = np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])
        return _sat_polys_intersect(Polytope.from_vertices(corners), sh2.data[0], tol)
    if (k1, k2) == ("poly", "shell"):
        poly, (sc, s1, s2, _) = sh1.data[0], sh2.data
        return _poly_shell_intersect(poly, sc, s1, s2)
    if k1 in _PROJECTABLE and k2 in _PROJECTABLE:
        dist, _ = alternating_projection_distance(sh1, sh2)
        return dist <= tol
    raise ArgumentError(f"no intersection rule for shapes ({k1}, {k2})")


def shape_sample_points(sh, n_per_axis=16, margin=0.0):
    """Points strictly inside a world shape (plus polygon vertices pulled inward)."""
    if sh.kind == "union":
        return np.concatenate([shape_sample_points(m, n_per_axis, margin) for m in sh.data])
    lo, hi = shape_bounding_box(sh)
    d = lo.shape[0]
    axes = [np.linspace(lo[a], hi[a], n_per_axis + 2)[1:-1] for a in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    pts = pts[shape_contains(sh, pts)]
    if sh.kind == "poly":
        poly = sh.data[0]
        c, _ = poly.chebyshev()
        inner = c + (poly.vertices - c) * (1.0 - max(margin, 1e-9))
        pts = np.concatenate([pts, inner[poly.contains(inner)]])
    return pts
