"""Coverings of open frequency regions by affine images of base sets.

A covering is an indexed family ``Q_i = T_i Q'_i + b_i`` drawn from a finite
base-set table, together with the region it covers, an optional closed-form
pairwise-intersection oracle (label arithmetic), and truncation metadata when
the family is a finite cut of an infinite one.  The geometric invariants that
the embedding machinery consumes (neighbor counts, the maximal neighbor count
N_Q, and the neighbor-scale constant C_Q = max |T_i^{-1} T_j|) are computed
here.

Values are immutable after construction and all operations are pure, so
pairwise scans and sampling may run concurrently without shared state.
"""

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import geometry
from .config import GEO_TOL
from .errors import ArgumentError

EPS_DET = 1e-12


@dataclass(frozen=True)
class AffineMap:
    """x -> T x + b with invertible T."""

    T: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        T = np.atleast_2d(np.asarray(self.T, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if T.shape[0] != T.shape[1] or T.shape[0] != b.shape[0]:
            raise ArgumentError("affine map shape mismatch")
        if abs(np.linalg.det(T)) <= EPS_DET:
            raise ArgumentError("affine map is singular (|det T| <= 1e-12)")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "_Tinv", np.linalg.inv(T))

    @property
    def dim(self):
        return self.b.shape[0]

    @property
    def det(self):
        return float(np.linalg.det(self.T))

    def apply(self, pts):
        return np.asarray(pts, dtype=float) @ self.T.T + self.b

    def pullback(self, pts):
        return (np.asarray(pts, dtype=float) - self.b) @ self._Tinv.T


@dataclass(frozen=True)
class CoveringSet:
    label: tuple
    map: AffineMap
    base: int  # index into the covering's base-set table


@dataclass(frozen=True)
class Region:
    """Covered region O: a predicate plus a bounding hint for sampling."""

    kind: str  # "full" | "punctured_plane" | "annulus"
    params: dict = field(default_factory=dict)

    def contains(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.kind == "full":
            return np.ones(pts.shape[0], dtype=bool)
        if self.kind == "punctured_plane":
            axis = self.params.get("axis", 0)
            return pts[:, axis] != 0.0
        if self.kind == "annulus":
            r = np.linalg.norm(pts, axis=-1)
            return (r >= self.params["rmin"]) & (r <= self.params["rmax"])
        raise ArgumentError(f"unknown region kind {self.kind!r}")

    def to_json(self):
        return {"kind": self.kind, **self.params}

    @staticmethod
    def from_json(obj):
        obj = dict(obj)
        kind = obj.pop("kind")
        return Region(kind, obj)


class Covering:
    """Indexed family of open sets T_i Q'_i + b_i covering a region."""

    def __init__(self, dim, base_sets, sets, region=None, oracle_id=None,
                 oracle=None, truncation=None):
        if not sets:
            raise ArgumentError("covering must contain at least one set")
        self.dim = int(dim)
        self.base_sets = list(base_sets)
        self.sets = sorted(sets, key=lambda s: s.label)
        self.region = region if region is not None else Region("full")
        self.oracle_id = oracle_id
        self.oracle = oracle  # (label_i, label_j) -> bool, or None
        self.truncation = truncation  # dict: family id + generator params
        for s in self.sets:
            if s.map.dim != self.dim:
                raise ArgumentError("set dimension mismatch")
            if not (0 <= s.base < len(self.base_sets)):
                raise ArgumentError("base-set table index out of range")
        self._index = {s.label: i for i, s in enumerate(self.sets)}
        self._shapes = [None] * len(self.sets)
        self._bboxes = None
        self._adjacency = None

    # -- bookkeeping ---------------------------------------------------------

    def __len__(self):
        return len(self.sets)

    @property
    def labels(self):
        return [s.label for s in self.sets]

    def position(self, label):
        try:
            return self._index[tuple(label)]
        except KeyError:
            raise ArgumentError(f"label {label!r} not in covering") from None

    def shape(self, i):
        if self._shapes[i] is None:
            s = self.sets[i]
            self._shapes[i] = geometry.world_shape(
                self.base_sets[s.base], s.map.T, s.map.b)
        return self._shapes[i]

    def bounding_boxes(self):
        if self._bboxes is None:
            los, his = [], []
            for i in range(len(self.sets)):
                lo, hi = geometry.shape_bounding_box(self.shape(i))
                los.append(lo)
                his.append(hi)
            self._bboxes = (np.array(los), np.array(his))
        return self._bboxes

    def frequency_extent(self, i):
        """max |xi| over the set's bounding box (truncation cutoffs use this)."""
        lo, hi = geometry.shape_bounding_box(self.shape(i))
        return float(np.linalg.norm(np.maximum(np.abs(lo), np.abs(hi))))

    # -- membership and intersection -----------------------------------------

    def contains(self, label, xi):
        """Strict membership of a point in the labelled set."""
        i = self.position(label)
        s = self.sets[i]
        pt = np.atleast_1d(np.asarray(xi, dtype=float))
        if pt.shape != (self.dim,):
            raise ArgumentError(f"point must have dimension {self.dim}")
        local = s.map.pullback(pt[None, :])
        return bool(self.base_sets[s.base].contains(local)[0])

    def sets_intersect(self, label_i, label_j, use_oracle=True):
        i, j = self.position(label_i), self.position(label_j)
        if use_oracle and self.oracle is not None:
            return bool(self.oracle(self.sets[i].label, self.sets[j].label))
        return geometry.shapes_intersect(self.shape(i), self.shape(j))

    def sets_intersect_geometric(self, label_i, label_j):
        """Shape-based decision, bypassing any label oracle."""
        return self.sets_intersect(label_i, label_j, use_oracle=False)

    # -- neighbor structure ----------------------------------------------------

    def adjacency(self, use_oracle=True):
        """Neighbor lists as positions; i is always its own neighbor."""
        if self._adjacency is not None and use_oracle:
            return self._adjacency
        n = len(self.sets)
        los, his = self.bounding_boxes()
        neighbors = [[] for _ in range(n)]
        for i in range(n):
            cand = np.nonzero(
                np.all((los[i] <= his) & (los <= his[i]), axis=1))[0]
            for j in cand:
                if j < i:
                    continue
                if j == i:
                    neighbors[i].append(i)
                    continue
                li, lj = self.sets[i].label, self.sets[j].label
                hit = (self.oracle(li, lj) if (use_oracle and self.oracle is not None)
                       else geometry.shapes_intersect(self.shape(i), self.shape(j)))
                if hit:
                    neighbors[i].append(j)
                    neighbors[j].append(i)
        result = [sorted(v) for v in neighbors]
        if use_oracle:
            self._adjacency = result
        return result

    def neighbor_sets(self, labels, k):
        """k-fold neighbor expansion of a label set (k = 0 returns it unchanged)."""
        if k < 0:
            raise ArgumentError("neighbor order must be nonnegative")
        current = {self.position(l) for l in labels}
        adj = self.adjacency()
        for _ in range(int(k)):
            nxt = set(current)
            for i in current:
                nxt.update(adj[i])
            if nxt == current:
                break
            current = nxt
        return {self.sets[i].label for i in current}


def neighbor_sets_of(cov, labels, k):
    """k-fold neighbor expansion J^{k*} of a label set (function form)."""
    return cov.neighbor_sets(labels, k)


@dataclass
class CoveringReport:
    N_Q: int = 0
    C_Q: float = 0.0
    coverage_fraction: float = float("nan")
    min_multiplicity: int = 0
    max_neighbor_count: int = 0
    stable: Optional[bool] = None

    def to_json(self):
        out = {"N_Q": self.N_Q, "C_Q": self.C_Q,
               "coverageFraction": self.coverage_fraction,
               "minMultiplicity": self.min_multiplicity,
               "maxNeighborCount": self.max_neighbor_count}
        if self.stable is not None:
            out["stable"] = self.stable
        return out


def covering_constants(cov):
    """Neighbor-count maximum N_Q and neighbor-scale constant C_Q.

    C_Q is the largest spectral norm |T_i^{-1} T_j| over intersecting pairs;
    it is at least 1 because every set neighbors itself.  For truncations the
    stability flag is filled in by ``covering_constants_stable``.
    """
    adj = cov.adjacency()
    n_q = max(len(v) for v in adj)
    c_q = 0.0
    for i, nbrs in enumerate(adj):
        Ti_inv = np.linalg.inv(cov.sets[i].map.T)
        for j in nbrs:
            c_q = max(c_q, float(np.linalg.norm(Ti_inv @ cov.sets[j].map.T, 2)))
    return CoveringReport(N_Q=n_q, C_Q=c_q)


def covering_constants_stable(build, radius):
    """Constants at truncation ``radius`` with a radius-vs-2*radius stability flag.

    ``build`` maps a truncation radius to a covering of the same family.
    """
    rep = covering_constants(build(radius))
    rep2 = covering_constants(build(2 * radius))
    rep.stable = (rep.N_Q == rep2.N_Q) and np.isclose(rep.C_Q, rep2.C_Q, rtol=1e-9)
    return rep


def verify_covering(cov, points):
    """Coverage statistics of sample points against the covering.

    ``points`` must already be confined to the covering's region (minus any
    excluded margin around blind spots); an empty sample is an error.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        raise ArgumentError("verify_covering needs a nonempty sample set")
    if pts.shape[1] != cov.dim:
        raise ArgumentError("sample dimension mismatch")
    hits = np.zeros(pts.shape[0], dtype=np.int64)
    los, his = cov.bounding_boxes()
    for i, s in enumerate(cov.sets):
        box = np.all((pts >= los[i]) & (pts <= his[i]), axis=1)
        if not np.any(box):
            continue
        local = s.map.pullback(pts[box])
        inside = cov.base_sets[s.base].contains(local)
        idx = np.nonzero(box)[0][inside]
        hits[idx] += 1
    covered = hits > 0
    frac = float(np.count_nonzero(covered)) / pts.shape[0]
    min_mult = int(hits[covered].min()) if np.any(covered) else 0
    max_mult = int(hits.max())
    return CoveringReport(coverage_fraction=frac, min_multiplicity=min_mult,
                          max_neighbor_count=max_mult)


def uniform_box_samples(lo, hi, n_per_axis):
    """Regular grid of sample points in a box."""
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    axes = [np.linspace(lo[a], hi[a], n_per_axis) for a in range(lo.shape[0])]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def annulus_samples(rmin, rmax, n, d, seed=0):
    """Log-radially spread sample points with rmin <= |xi| <= rmax."""
    rng = np.random.default_rng(seed)
    radii = np.exp(rng.uniform(np.log(rmin), np.log(rmax), size=n))
    if d == 1:
        signs = rng.choice([-1.0, 1.0], size=n)
        return (radii * signs)[:, None]
    dirs = rng.normal(size=(n, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return radii[:, None] * dirs


# ---------------------------------------------------------------------------
# serialization (deterministic: sets ordered lexicographically by label)
# ---------------------------------------------------------------------------


def covering_to_json(cov):
    return {
        "dim": cov.dim,
        "region": cov.region.to_json(),
        "baseSets": [b.to_json() for b in cov.base_sets],
        "sets": [
            {"label": list(s.label), "T": s.map.T.tolist(),
             "b": s.map.b.tolist(), "base": s.base}
            for s in cov.sets
        ],
        "oracle": cov.oracle_id,
        "truncation": cov.truncation,
    }


def covering_dumps(cov):
    return json.dumps(covering_to_json(cov), sort_keys=True)


_ORACLE_REGISTRY: dict[str, Callable] = {}


def register_oracle(oracle_id, factory):
    """Register a factory (params dict -> label predicate) for (de)serialization."""
    _ORACLE_REGISTRY[oracle_id] = factory


def covering_from_json(obj):
    base_sets = [geometry.base_set_from_json(b) for b in obj["baseSets"]]
    sets = [
        CoveringSet(tuple(e["label"]), AffineMap(np.array(e["T"]), np.array(e["b"])),
                    int(e["base"]))
        for e in obj["sets"]
    ]
    oracle = None
    oracle_id = obj.get("oracle")
    if oracle_id is not None and oracle_id in _ORACLE_REGISTRY:
        oracle = _ORACLE_REGISTRY[oracle_id](obj.get("truncation") or {})
    return Covering(obj["dim"], base_sets, sets,
                    region=Region.from_json(obj["region"]),
                    oracle_id=oracle_id, oracle=oracle,
                    truncation=obj.get("truncation"))


def covering_loads(text):
    return covering_from_json(json.loads(text))
