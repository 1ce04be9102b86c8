"""Lebesgue-exponent algebra on [1, inf], with inf represented exactly.

All arithmetic is done on reciprocals (1/inf = 0) to keep the conventions
unambiguous: the conjugate satisfies 1/p + 1/p' = 1, and the compound
exponent arising from Hoelder splitting is holder_exponent(s, t) = the r
with 1/r = (1/s - 1/t)_+ (so r = inf once t <= s).
"""

import math

import numpy as np

from .errors import ArgumentError

INF = math.inf


def check_exponent(p):
    p = float(p)
    if not (p >= 1.0):
        raise ArgumentError(f"exponent must lie in [1, inf], got {p}")
    return p


def rec(p):
    """1/p with 1/inf = 0."""
    p = check_exponent(p)
    return 0.0 if math.isinf(p) else 1.0 / p


def from_rec(r):
    if r < -1e-15 or r > 1.0 + 1e-15:
        raise ArgumentError(f"reciprocal exponent out of range: {r}")
    return INF if r <= 1e-15 else 1.0 / r


def conjugate(p):
    """p' with 1/p + 1/p' = 1; conjugate(1) = inf and conjugate(inf) = 1."""
    return from_rec(1.0 - rec(p))


def triangle_up(p):
    """max(p, p')."""
    return max(check_exponent(p), conjugate(p))


def triangle_down(p):
    """min(p, p')."""
    return min(check_exponent(p), conjugate(p))


def holder_exponent(s, t):
    """The r with 1/r = (1/s - 1/t)_+, i.e. the exponent 's (t/s)'' ."""
    return from_rec(max(0.0, rec(s) - rec(t)))


def positive_part(x):
    return max(0.0, x)


def lq_norm(values, q):
    """Plain ell^q norm of a nonneg array, q in [1, inf]."""
    a = np.asarray(values, dtype=float)
    if a.size == 0:
        return 0.0
    if math.isinf(q):
        return float(a.max())
    return float((a ** q).sum() ** (1.0 / q))


def parse_exponent(text):
    """CLI-facing parser: 'inf' (any case) or a float >= 1."""
    t = str(text).strip().lower()
    if t in ("inf", "infinity", "oo"):
        return INF
    return check_exponent(float(t))
