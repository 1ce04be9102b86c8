"""Smooth cutoff profiles used for partitions of unity and window systems.

All profiles are built from compactly supported C^infinity transition
functions; evaluating them is exact pointwise (no quadrature), so algebraic
identities between profiles hold to rounding error on any grid.
"""

import numpy as np

PROFILE_IDS = ("exp_recip", "exp_recip_sq")


def _ramp(t, profile="exp_recip"):
    """exp(-1/t) (or exp(-1/t^2)), extended by 0 for t <= 0."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        if profile == "exp_recip":
            out[pos] = np.exp(-1.0 / t[pos])
        elif profile == "exp_recip_sq":
            out[pos] = np.exp(-1.0 / t[pos] ** 2)
        else:
            raise ValueError(f"unknown profile {profile!r}")
    return out


def smoothstep(t, profile="exp_recip"):
    """C^infinity ramp: 0 for t <= 0, 1 for t >= 1, strictly increasing between."""
    a = _ramp(t, profile)
    b = _ramp(1.0 - np.asarray(t, dtype=float), profile)
    with np.errstate(invalid="ignore"):
        s = np.where(a + b > 0, a / (a + b), 0.0)
    return np.where(np.asarray(t) >= 1.0, 1.0, np.where(np.asarray(t) <= 0.0, 0.0, s))


def plateau(s, shrink, profile="exp_recip"):
    """Bump in the gauge variable: 1 for s <= shrink, 0 for s >= 1.

    ``s`` is a normalized gauge (0 at the center of a set, 1 on its
    boundary); ``shrink`` in (0,1) fixes where the flat plateau ends.
    """
    if not 0.0 < shrink < 1.0:
        raise ValueError("shrink must lie in (0,1)")
    s = np.asarray(s, dtype=float)
    return smoothstep((1.0 - s) / (1.0 - shrink), profile)


def radial_cutoff(rho, profile="exp_recip"):
    """Radial plateau: 1 for rho <= 1, 0 for rho >= 2, smooth in between."""
    return smoothstep(2.0 - np.asarray(rho, dtype=float), profile)
