"""Structural relations between coverings and between weights and coverings.

Given a fine covering Q = (Q_i) and a coarse covering P = (P_j) of the same
frequency space, this module computes the per-coarse-set intersection sets
I_j = {i : Q_i meets P_j}, detects the least subordination order n such that
every Q_i sits inside an n-fold neighbor union of a single P_j, and measures
weight moderateness on neighbors (C_{u,Q}) and across intersection sets
(relative moderateness).  Every quantity is computed on the finite
truncations at hand; reports carry that provenance.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import geometry
from .config import GEO_TOL
from .errors import ArgumentError, PreconditionError


@dataclass
class RelationReport:
    I_j: dict = field(default_factory=dict)          # coarse label -> set of fine labels
    J_O: set = field(default_factory=set)            # coarse labels meeting O
    subordination_order: Optional[int] = None
    C_uQ: Optional[float] = None
    C_uQ_stable: Optional[bool] = None
    rel_mod_constant: Optional[float] = None
    rel_mod_stable: Optional[bool] = None
    provenance: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "I_j": {",".join(map(str, j)): sorted(map(list, v)) for j, v in self.I_j.items()},
            "J_O": sorted(map(list, self.J_O)),
            "subordinationOrder": self.subordination_order,
            "C_uQ": self.C_uQ,
            "relModConstant": self.rel_mod_constant,
            "provenance": self.provenance,
        }


def _cross_pairs(fine, coarse):
    """Candidate (i, j) pairs by bounding-box overlap, then exact geometry."""
    flo, fhi = fine.bounding_boxes()
    clo, chi = coarse.bounding_boxes()
    hits = {}
    for j in range(len(coarse.sets)):
        cand = np.nonzero(np.all((clo[j] <= fhi) & (flo <= chi[j]), axis=1))[0]
        if cand.size == 0:
            hits[j] = []
            continue
        sh_j = coarse.shape(j)
        found = [i for i in cand
                 if geometry.shapes_intersect(fine.shape(int(i)), sh_j)]
        hits[j] = found
    return hits


def intersection_sets(fine, coarse, region_samples_per_set=16):
    """I_j and J_O for a fine/coarse covering pair of the same dimension."""
    if fine.dim != coarse.dim:
        raise ArgumentError("coverings must share dimension")
    hits = _cross_pairs(fine, coarse)
    report = RelationReport()
    fine_lo, fine_hi = fine.bounding_boxes()
    hull_lo, hull_hi = fine_lo.min(axis=0), fine_hi.max(axis=0)
    for j, s in enumerate(coarse.sets):
        labels = {fine.sets[i].label for i in hits[j]}
        report.I_j[s.label] = labels
        pts = geometry.shape_sample_points(coarse.shape(j), region_samples_per_set)
        in_region = bool(np.any(fine.region.contains(pts))) if pts.size else False
        if in_region:
            report.J_O.add(s.label)
            inside_hull = bool(np.all(pts >= hull_lo) and np.all(pts <= hull_hi))
            if not labels and inside_hull:
                raise PreconditionError(
                    f"coarse set {s.label} meets O but intersects no fine set; "
                    "fine truncation too small")
    report.provenance = {
        "fine": fine.truncation, "coarse": coarse.truncation,
        "method": "geometric", "containment": "sampled",
    }
    return report


def _set_sample_points(cov, i, n_per_axis=16, margin=GEO_TOL):
    return geometry.shape_sample_points(cov.shape(i), n_per_axis, margin)


def almost_subordinate(fine, coarse, n_max=8, n_per_axis=16):
    """Least n with every Q_i inside an n-fold neighbor union of some P_j.

    Containment is tested on a dense sample of each fine set (with vertices
    of polytope pieces pulled inward); None when no n <= n_max works on the
    truncations at hand.
    """
    if fine.dim != coarse.dim:
        raise ArgumentError("coverings must share dimension")
    _check_region_containment(fine, coarse)
    hits = _cross_pairs(fine, coarse)
    touching = {}
    for j, found in hits.items():
        for i in found:
            touching.setdefault(i, []).append(j)
    n_fine = len(fine.sets)
    samples = [_set_sample_points(fine, i, n_per_axis) for i in range(n_fine)]
    for i in range(n_fine):
        if i not in touching or samples[i].size == 0:
            return None
    coarse_adj = coarse.adjacency()
    for n in range(n_max + 1):
        ok = True
        for i in range(n_fine):
            pts = samples[i]
            contained = False
            for j in touching[i]:
                group = _expand(coarse_adj, j, n)
                mask = np.zeros(pts.shape[0], dtype=bool)
                for ell in group:
                    mask |= geometry.shape_contains(coarse.shape(ell), pts)
                    if mask.all():
                        break
                if mask.all():
                    contained = True
                    break
            if not contained:
                ok = False
                break
        if ok:
            return n
    return None


def _expand(adj, j, n):
    group = {j}
    for _ in range(n):
        nxt = set(group)
        for v in group:
            nxt.update(adj[v])
        if nxt == group:
            break
        group = nxt
    return group


def _check_region_containment(fine, coarse, n=512, seed=0):
    lo, hi = fine.bounding_boxes()
    box_lo, box_hi = lo.min(axis=0), hi.max(axis=0)
    rng = np.random.default_rng(seed)
    pts = rng.uniform(box_lo, box_hi, size=(n, fine.dim))
    pts = pts[fine.region.contains(pts)]
    if pts.size and not np.all(coarse.region.contains(pts)):
        raise PreconditionError(
            "fine covering's region is not contained in the coarse one")


def moderate_constants(cov, u, coarse=None, stability_fraction=0.5):
    """Moderateness constant on neighbors and, given a coarse covering,
    the relative moderateness constant across intersection sets.

    Stability flags compare the constant on the inner ``stability_fraction``
    of the truncation against the full truncation.
    """
    for s in cov.sets:
        if s.label not in u:
            raise ArgumentError(f"weight missing on label {s.label!r}")
    adj = cov.adjacency()
    extents = np.array([cov.frequency_extent(i) for i in range(len(cov.sets))])
    cutoff = np.quantile(extents, stability_fraction)

    def c_uq(active):
        best = 1.0
        for i in np.nonzero(active)[0]:
            ui = u[cov.sets[i].label]
            for j in adj[i]:
                if active[j]:
                    best = max(best, ui / u[cov.sets[j].label])
        return best

    all_active = np.ones(len(cov.sets), dtype=bool)
    inner_active = extents <= cutoff
    report = RelationReport()
    report.C_uQ = c_uq(all_active)
    report.C_uQ_stable = bool(np.isclose(report.C_uQ, c_uq(inner_active), rtol=1e-9)) \
        if inner_active.sum() >= 2 else None
    if coarse is not None:
        rel = intersection_sets(cov, coarse)
        report.I_j = rel.I_j
        report.J_O = rel.J_O
        best = 1.0
        for j, labels in rel.I_j.items():
            vals = [u[lab] for lab in labels]
            if vals:
                best = max(best, max(vals) / min(vals))
        report.rel_mod_constant = best
    report.provenance = {"truncation": cov.truncation}
    return report
