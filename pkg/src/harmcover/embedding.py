"""Embedding decisions between decomposition-type smoothness spaces.

Three decision routes are provided:

* ``decide_general`` evaluates, on growing truncations, the nested mixed-norm
  constants that control embeddings between two covered spaces when the fine
  covering is almost subordinate to the coarse one, and classifies each
  constant as finite/infinite/boundary from its growth along the truncation
  schedule.

* ``decide_alpha_modulation`` is the closed-form characterization for the
  scale of ball coverings interpolating uniform and dyadic geometry.

* ``decide_shearlet_besov`` is the closed-form sufficient/necessary pair for
  embedding shear-dilation smoothness spaces into inhomogeneous dyadic ones.

Throughout, the fine covering carries the exponents (p1, q1) and weight u,
the coarse covering carries (p2, q2) and v; the direction selects which side
is the source space.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exponents import (INF, check_exponent, conjugate, holder_exponent, lq_norm,
                        positive_part, rec, triangle_down, triangle_up)
from .errors import ArgumentError, PreconditionError
from .relations import almost_subordinate, intersection_sets, moderate_constants

TOL_GROWTH = 0.01     # relative growth at the last doubling that still counts as finite
SLOPE_MIN = 0.05      # log-log slope above which growth counts as divergence

FINITE, INFINITE, BOUNDARY = "FINITE", "INFINITE", "boundaryUndecided"


@dataclass
class EmbeddingQuery:
    """Fine side (p1, q1, u) against coarse side (p2, q2, v).

    direction 'QIntoP' embeds the fine-covering space into the coarse one;
    'PIntoQ' is the reverse.  The truncation schedule lists increasing
    frequency radii at which the constants are partially evaluated.
    """

    fine: object
    coarse: object
    u: object
    v: object
    p1: float
    q1: float
    p2: float
    q2: float
    direction: str
    truncation_schedule: tuple = (32.0, 64.0, 128.0, 256.0, 512.0)

    def __post_init__(self):
        for p in (self.p1, self.q1, self.p2, self.q2):
            check_exponent(p)
        if self.direction not in ("QIntoP", "PIntoQ"):
            raise ArgumentError("direction must be 'QIntoP' or 'PIntoQ'")


@dataclass
class EmbeddingVerdict:
    holds: str                    # "yes" | "no" | "boundaryUndecided"
    binding_condition: str
    constants: dict = field(default_factory=dict)
    mode: str = "numerical"       # "closedForm" | "numerical"

    def to_json(self):
        return {"holds": self.holds, "bindingCondition": self.binding_condition,
                "constants": _jsonable(self.constants), "mode": self.mode}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


# ---------------------------------------------------------------------------
# truncated constants
# ---------------------------------------------------------------------------


class RelationBundle:
    """Precomputed relation data shared by all queries on one covering pair."""

    def __init__(self, fine, coarse, n_max=8):
        self.fine = fine
        self.coarse = coarse
        self.relations = intersection_sets(fine, coarse)
        self.subordination = almost_subordinate(fine, coarse, n_max=n_max)
        self.det_T = {s.label: abs(s.map.det) for s in fine.sets}
        self.det_S = {s.label: abs(s.map.det) for s in coarse.sets}
        self.coarse_extent = {s.label: coarse.frequency_extent(i)
                              for i, s in enumerate(coarse.sets)}

    def coarse_labels_within(self, radius):
        return [j for j, ext in self.coarse_extent.items() if ext <= radius]


def embedding_constants(query, r, bundle=None, representative="first"):
    """Partial values of C1^{(r)} and C2 along the truncation schedule.

    Each partial value keeps only coarse sets whose frequency extent fits
    in the truncation radius; the values are nondecreasing in the radius.
    Returns a dict with the traces and a finiteness verdict for C1.
    """
    if bundle is None:
        bundle = RelationBundle(query.fine, query.coarse)
    rel = bundle.relations
    p1, q1, p2, q2 = query.p1, query.q1, query.p2, query.q2
    if query.direction == "PIntoQ":
        inner_exp = holder_exponent(q1, r)
        outer_exp = holder_exponent(q1, q2)
        det_pow = rec(p2) - rec(p1)
        e2 = positive_part(rec(q1) - rec(triangle_up(p2)))
        rep_pow_T = rec(p2) - e2 - rec(p1)
    else:
        inner_exp = holder_exponent(r, q1)
        outer_exp = holder_exponent(q2, q1)
        det_pow = rec(p1) - rec(p2)
        e2 = positive_part(rec(triangle_down(p2)) - rec(q1))
        rep_pow_T = rec(p1) - e2 - rec(p2)

    c1_trace, c2_trace = [], []
    for radius in query.truncation_schedule:
        js = bundle.coarse_labels_within(radius)
        outer_terms, c2_terms = [], []
        for j in js:
            labels = sorted(rel.I_j.get(j, ()))
            if not labels:
                continue
            v_j = query.v[j]
            if query.direction == "PIntoQ":
                inner = lq_norm([bundle.det_T[i] ** det_pow * query.u[i]
                                 for i in labels], inner_exp)
                outer_terms.append(inner / v_j)
            else:
                inner = lq_norm([bundle.det_T[i] ** det_pow / query.u[i]
                                 for i in labels], inner_exp)
                outer_terms.append(v_j * inner)
            if j in rel.J_O:
                i_j = labels[0] if representative == "first" else labels[-1]
                ratio = (query.u[i_j] / v_j if query.direction == "PIntoQ"
                         else v_j / query.u[i_j])
                c2_terms.append(ratio * bundle.det_T[i_j] ** rep_pow_T
                                * bundle.det_S[j] ** e2)
        c1_trace.append(lq_norm(outer_terms, outer_exp))
        c2_trace.append(lq_norm(c2_terms, outer_exp))
    return {
        "r": r,
        "schedule": list(query.truncation_schedule),
        "C1_partial": c1_trace,
        "C2_partial": c2_trace,
        "C1_verdict": classify_growth(query.truncation_schedule, c1_trace),
        "C2_verdict": classify_growth(query.truncation_schedule, c2_trace),
    }


def classify_growth(schedule, values, tol_growth=TOL_GROWTH, slope_min=SLOPE_MIN):
    """FINITE / INFINITE / boundary from partial values along a schedule.

    Finite: relative increase below tol_growth at the last doubling.
    Infinite: log-log slope above slope_min over the last two doublings.
    Anything in between stays undecided rather than being silently resolved.
    """
    vals = [v for v in values]
    if len(vals) < 3:
        return BOUNDARY
    if vals[-1] == 0.0:
        return FINITE
    if not all(np.isfinite(vals)):
        return INFINITE
    prev, last = vals[-2], vals[-1]
    rel_growth = (last - prev) / prev if prev > 0 else math.inf
    if rel_growth < tol_growth:
        return FINITE
    slopes = []
    for a, b, ra, rb in [(vals[-3], vals[-2], schedule[-3], schedule[-2]),
                         (vals[-2], vals[-1], schedule[-2], schedule[-1])]:
        if a <= 0:
            return BOUNDARY
        slopes.append(math.log(b / a) / math.log(rb / ra))
    if all(s > slope_min for s in slopes):
        return INFINITE
    return BOUNDARY


# ---------------------------------------------------------------------------
# general decision
# ---------------------------------------------------------------------------


def decide_general(query, bundle=None, check_moderate=True):
    """Verdict for one embedding query from the truncated constants.

    Requires the fine covering to be almost subordinate to the coarse one
    (error naming the assumption otherwise).  The p-comparison plus the
    decisive constant settle the verdict; when the sufficient and necessary
    exponents differ, the gap is closed through relative moderateness if it
    holds, and reported otherwise.
    """
    if bundle is None:
        bundle = RelationBundle(query.fine, query.coarse)
    if bundle.subordination is None:
        raise PreconditionError(
            "assumption violated: fine covering is not almost subordinate to the "
            "coarse covering (no subordination order found on the truncation)")
    p1, p2 = query.p1, query.p2
    constants = {"subordinationOrder": bundle.subordination}
    if query.direction == "PIntoQ":
        p_ok, p_tag = (p2 <= p1), "p2 <= p1"
        r_suf = triangle_up(p2)
    else:
        p_ok, p_tag = (p1 <= p2), "p1 <= p2"
        r_suf = triangle_down(p2)
    r_nec = p2
    if not p_ok:
        return EmbeddingVerdict("no", p_tag, constants, "closedForm")

    suf = embedding_constants(query, r_suf, bundle)
    constants["sufficient"] = suf
    if suf["C1_verdict"] == FINITE:
        return EmbeddingVerdict("yes", f"{p_tag} and C1({_fmt(r_suf)}) finite",
                                constants, "numerical")
    if r_nec == r_suf:
        if suf["C1_verdict"] == INFINITE:
            return EmbeddingVerdict("no", f"C1({_fmt(r_nec)}) infinite (necessity)",
                                    constants, "numerical")
        return EmbeddingVerdict(BOUNDARY, "C1 growth within the undecided band",
                                constants, "numerical")
    nec = embedding_constants(query, r_nec, bundle)
    constants["necessary"] = nec
    if nec["C1_verdict"] == INFINITE:
        return EmbeddingVerdict("no", f"C1({_fmt(r_nec)}) infinite (necessity)",
                                constants, "numerical")
    # gap between the sufficient and necessary exponents
    if check_moderate and _relatively_moderate(query, bundle):
        constants["relativelyModerate"] = True
        if suf["C1_verdict"] == INFINITE:
            return EmbeddingVerdict("no", f"C1({_fmt(r_suf)}) infinite "
                                    "(equivalence under relative moderateness)",
                                    constants, "closedForm")
        return EmbeddingVerdict(BOUNDARY, "C1 growth within the undecided band",
                                constants, "numerical")
    constants["relativelyModerate"] = False
    return EmbeddingVerdict(
        BOUNDARY, "sufficient/necessary gap: C1(suf) not finite, C1(nec) not infinite",
        constants, "numerical")


def _fmt(r):
    return "inf" if math.isinf(r) else f"{r:g}"


def _relatively_moderate(query, bundle):
    """Covering and weight relatively moderate, and coarse sets inside O."""
    from .zoo import make_weight
    det_weight = make_weight({"generator": "detT"}, query.fine)
    rep_cov = moderate_constants(query.fine, det_weight, coarse=query.coarse)
    rep_u = moderate_constants(query.fine, query.u, coarse=query.coarse)
    if rep_cov.rel_mod_constant is None or rep_u.rel_mod_constant is None:
        return False
    finite = np.isfinite(rep_cov.rel_mod_constant) and np.isfinite(rep_u.rel_mod_constant)
    inside = _coarse_inside_region(query.fine, query.coarse, bundle)
    return bool(finite and inside)


def _coarse_inside_region(fine, coarse, bundle):
    from . import geometry
    for j_label in bundle.relations.J_O:
        j = coarse.position(j_label)
        pts = geometry.shape_sample_points(coarse.shape(j), 8)
        if pts.size and not np.all(fine.region.contains(pts)):
            return False
    return True


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def decide_alpha_modulation(alpha, beta, p1, q1, s1, p2, q2, s2, d,
                            direction="forward"):
    """Closed-form embedding verdict between two alpha-scale smoothness spaces.

    ``forward`` embeds the alpha-side space (smoothness s1, exponents p1, q1)
    into the beta-side one; ``reverse`` goes the other way.  Requires
    alpha <= beta; callers wanting the opposite orientation should swap and
    use the other direction.  The verdict needs p1 <= p2 together with a
    smoothness inequality whose threshold involves

        s0 = alpha (1/p2 - 1/p1) + (alpha - beta) (1/p2_down - 1/q1)_+
        s1* = alpha (1/p2 - 1/p1) + (alpha - beta) (1/q2 - 1/p1_up)_+

    and is strict, with an extra (1 - beta)(1/q1 - 1/q2) term, when q1 > q2.
    """
    if not (0.0 <= alpha <= 1.0 and 0.0 <= beta <= 1.0):
        raise ArgumentError("alpha and beta must lie in [0, 1]")
    if alpha > beta:
        raise ArgumentError("requires alpha <= beta; swap the spaces and flip direction")
    for p in (p1, q1, p2, q2):
        check_exponent(p)
    if direction == "forward":
        s_shift = (alpha * (rec(p2) - rec(p1))
                   + (alpha - beta) * positive_part(rec(triangle_down(p2)) - rec(q1)))
    elif direction == "reverse":
        s_shift = (alpha * (rec(p2) - rec(p1))
                   + (alpha - beta) * positive_part(rec(q2) - rec(triangle_up(p1))))
    else:
        raise ArgumentError("direction must be 'forward' or 'reverse'")

    constants = {"sShift": s_shift}
    if not p1 <= p2:
        return EmbeddingVerdict("no", "p1 <= p2", constants, "closedForm")
    if q1 <= q2:
        threshold = s1 + d * s_shift
        margin = threshold - s2
        constants.update({"threshold": threshold, "margin": margin, "strict": False})
        if s2 <= threshold:
            return EmbeddingVerdict("yes", "s2 <= s1 + d*s^(0)", constants, "closedForm")
        return EmbeddingVerdict("no", "s2 <= s1 + d*s^(0)", constants, "closedForm")
    threshold = s1 + d * (s_shift + (1.0 - beta) * (rec(q1) - rec(q2)))
    margin = threshold - s2
    constants.update({"threshold": threshold, "margin": margin, "strict": True})
    if s2 < threshold:
        return EmbeddingVerdict("yes", "s2 < s1 + d*(s^(0) + (1-beta)(1/q1 - 1/q2))",
                                constants, "closedForm")
    return EmbeddingVerdict("no", "s2 < s1 + d*(s^(0) + (1-beta)(1/q1 - 1/q2))",
                            constants, "closedForm")


def alpha_modulation_margin(alpha, beta, p1, q1, s1, p2, q2, s2, d,
                            direction="forward"):
    """Distance of s2 from the decision threshold (boundary closeness)."""
    v = decide_alpha_modulation(alpha, beta, p1, q1, s1, p2, q2, s2, d, direction)
    return abs(v.constants.get("margin", math.inf))


def decide_shearlet_besov(c, alpha, beta, gamma, p1, q1, p2, q2):
    """Sufficient and necessary verdicts for shear-space into dyadic-space.

    The sufficient branch uses p2_down = min(p2, p2'); the necessary branch
    repeats the same inequalities with p2_down replaced by p2 everywhere,
    including inside the gamma threshold.  The two coincide for p2 <= 2.
    """
    if not 0 < c <= 1:
        raise ArgumentError("anisotropy c must lie in (0, 1]")
    for p in (p1, q1, p2, q2):
        check_exponent(p)

    def verdict(pv):
        base = rec(p1) - rec(p2) - rec(q1) + 0.5 + beta
        alpha1 = (1.0 + c) / c * base
        gamma1 = -(1.0 + c) * base + (c - 1.0) * positive_part(rec(pv) - rec(q1))
        if not p1 <= p2:
            return False, "p1 <= p2", {"alpha1": alpha1, "gamma1": gamma1}
        if q1 <= q2:
            gamma_ok = gamma <= alpha + gamma1
            gamma_tag = "gamma <= alpha + gamma^(1)"
        else:
            gamma_ok = gamma < alpha + gamma1
            gamma_tag = "gamma < alpha + gamma^(1)"
        if rec(pv) < rec(q1):  # q1 > pv
            alpha_ok = max(rec(pv) - rec(q1), alpha) < alpha1
            alpha_tag = "max(1/pv - 1/q1, alpha) < alpha^(1)"
        else:
            alpha_ok = max(0.0, alpha) <= alpha1
            alpha_tag = "max(0, alpha) <= alpha^(1)"
        tag = gamma_tag if not gamma_ok else (alpha_tag if not alpha_ok else "all")
        return gamma_ok and alpha_ok, tag, {"alpha1": alpha1, "gamma1": gamma1}

    suf_ok, suf_tag, suf_const = verdict(triangle_down(p2))
    nec_ok, nec_tag, nec_const = verdict(p2)
    return {
        "sufficientVerdict": EmbeddingVerdict(
            "yes" if suf_ok else "no", suf_tag, suf_const, "closedForm"),
        "necessaryVerdict": EmbeddingVerdict(
            "yes" if nec_ok else "no", nec_tag, nec_const, "closedForm"),
        "characterizationComplete": triangle_down(p2) == p2,
    }
