"""Shear-dilation groups on the plane and the associated wavelet transform.

Group elements are eps * [[a, b], [0, a^c]] with a > 0, b real,
eps in {+1, -1}, for a fixed anisotropy exponent c in (0, 1].  The group
convolves with translations to act on signals by x -> T_x D_h, and the
transform W f(x, h) = <f, T_x D_h psi> is evaluated either through the
frequency-side product formula (per h, on the whole spatial grid) or by
direct spatial quadrature at requested points.

The left Haar measure on the dilation part is da db / a^2, verified
numerically by the left-invariance check below; mixed (p, q) norms use the
quotient density da db / a^3 so that p = q recovers the plain group norm.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, PreconditionError
from .grid import GridFunction, lp_norm
from .profiles import plateau


@dataclass(frozen=True)
class GroupElement:
    """eps * [[a, b], [0, a^c]] for the ambient anisotropy c."""

    eps: int
    a: float
    b: float
    c: float

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise ArgumentError("eps must be +1 or -1")
        if not self.a > 0:
            raise ArgumentError("a must be positive")

    @property
    def shear(self):
        """Shear coordinate s = b / a^c."""
        return self.b / self.a ** self.c

    def matrix(self):
        return self.eps * np.array([[self.a, self.b], [0.0, self.a ** self.c]])

    def det(self):
        return self.a ** (1.0 + self.c)

    def mul(self, other):
        if other.c != self.c:
            raise ArgumentError("group elements must share the anisotropy c")
        a = self.a * other.a
        b = self.a * other.b + self.b * other.a ** self.c
        return GroupElement(self.eps * other.eps, a, b, self.c)

    def inv(self):
        a = 1.0 / self.a
        b = -self.b * self.a ** (-(1.0 + self.c))
        return GroupElement(self.eps, a, b, self.c)

    def inv_transpose(self):
        """Matrix h^{-T}, the action on the frequency side."""
        a, c = self.a, self.c
        return self.eps * np.array([[1.0 / a, 0.0],
                                    [-self.b * a ** (-(1.0 + c)), a ** (-c)]])

    def dual_action(self, xi):
        """h^{-T} xi for a point or an (n, 2) array of frequency points."""
        return np.asarray(xi, dtype=float) @ self.inv_transpose().T


def identity_element(c):
    return GroupElement(1, 1.0, 0.0, c)


# ---------------------------------------------------------------------------
# well-spread families
# ---------------------------------------------------------------------------


def family_labels(j_range, k_range):
    j_lo, j_hi = j_range
    k_lo, k_hi = (-k_range, k_range) if np.isscalar(k_range) else k_range
    return [(j, k, eps)
            for j in range(j_lo, j_hi + 1)
            for k in range(k_lo, k_hi + 1)
            for eps in (1, -1)]


def element_for_label(label, c, delta):
    j, k, eps = label
    a = 2.0 ** j
    return GroupElement(eps, a, delta * k * a, c)


def shear_cell(label, c, delta):
    """The (a, s)-coordinate cell h_{j,k} K1 with K1 = [1,2] x [-delta/2, delta/2]."""
    j, k, _ = label
    a_lo, a_hi = 2.0 ** j, 2.0 ** (j + 1)
    step = delta * 2.0 ** (j * (1.0 - c))
    return (a_lo, a_hi), (step * (k - 0.5), step * (k + 0.5))


def well_spread_family(c, delta, j_range, k_range, validate=True):
    """Group samples a = 2^j, s = delta k 2^{j(1-c)}, eps = +-1.

    In (a, s) coordinates the composition law is
    (a1, s1)(a2, s2) = (a1 a2, s1 + a1^{1-c} s2), so the translated cells
    h_{j,k} K1 tile a rectangle; the covering and separation properties are
    validated by direct enumeration on the truncated family.
    """
    if not 0 < c <= 1:
        raise ArgumentError("anisotropy c must lie in (0, 1]")
    if delta <= 0:
        raise ArgumentError("shear spacing delta must be positive")
    labels = family_labels(j_range, k_range)
    elements = {lab: element_for_label(lab, c, delta) for lab in labels}
    if validate:
        _validate_well_spread(labels, c, delta)
    return labels, elements


def _validate_well_spread(labels, c, delta, n_samples=23):
    pos = [lab for lab in labels if lab[2] == 1]
    j_vals = sorted({lab[0] for lab in pos})
    # covering: sample the (a, s) box known to be tiled by the cells
    a_lo, a_hi = 2.0 ** j_vals[0], 2.0 ** (j_vals[-1] + 1)
    k_hi = max(lab[1] for lab in pos)
    s_max = min(delta * 2.0 ** (j * (1.0 - c)) * (k_hi + 0.5) for j in j_vals)
    a_samp = np.exp(np.linspace(math.log(a_lo) + 1e-9, math.log(a_hi) - 1e-9, n_samples))
    s_samp = np.linspace(-s_max + 1e-9, s_max - 1e-9, n_samples)
    cells = [shear_cell(lab, c, delta) for lab in pos]
    for a in a_samp:
        for s in s_samp:
            if not any(alo <= a <= ahi and slo <= s <= shi
                       for (alo, ahi), (slo, shi) in cells):
                raise PreconditionError(
                    f"well-spread covering fails at group point (a={a}, s={s})")
    # separation: shrunken K2 cells must be pairwise disjoint
    for idx, lab in enumerate(pos):
        (alo, ahi), (slo, shi) = _k2_cell(lab, c, delta)
        for lab2 in pos[idx + 1:]:
            (blo, bhi), (tlo, thi) = _k2_cell(lab2, c, delta)
            if alo < bhi and blo < ahi and slo < thi and tlo < shi:
                raise PreconditionError(
                    f"well-spread separation fails for {lab} vs {lab2}")


def _k2_cell(label, c, delta):
    j, k, _ = label
    a_lo, a_hi = 2.0 ** j, 2.0 ** (j + 0.9)
    step = delta * 2.0 ** (j * (1.0 - c))
    return (a_lo, a_hi), (step * k - 0.45 * delta * 2.0 ** (j * (1.0 - c)),
                          step * k + 0.45 * delta * 2.0 ** (j * (1.0 - c)))


# ---------------------------------------------------------------------------
# Haar measure
# ---------------------------------------------------------------------------


def haar_quadrature_grid(a_range, b_range, n_a=400, n_b=400):
    """Midpoint grid in (t = log2 a, b) with left-Haar weights da db / a^2."""
    t_lo, t_hi = math.log2(a_range[0]), math.log2(a_range[1])
    t = np.linspace(t_lo, t_hi, n_a, endpoint=False) + (t_hi - t_lo) / (2 * n_a)
    b = np.linspace(b_range[0], b_range[1], n_b, endpoint=False) \
        + (b_range[1] - b_range[0]) / (2 * n_b)
    dt = (t_hi - t_lo) / n_a
    db = (b_range[1] - b_range[0]) / n_b
    A, B = np.meshgrid(2.0 ** t, b, indexing="ij")
    # da db / a^2 = ln2 * 2^t dt db / 2^{2t}
    W = math.log(2.0) * (2.0 ** t)[:, None] ** (-1.0) * dt * db
    W = np.broadcast_to(W, A.shape)
    return A, B, W


def haar_integral(F, a_range=(1 / 16, 16.0), b_range=(-8.0, 8.0), n=400):
    A, B, W = haar_quadrature_grid(a_range, b_range, n, n)
    return float(np.sum(F(A, B) * W))


def smooth_group_bump(a0=1.0, b0=0.0, sa=0.5, sb=1.0):
    """Compactly supported smooth test function on the (a, b) half-plane."""
    def F(A, B):
        ta = (np.log2(A) - math.log2(a0)) / sa
        tb = (B - b0) / sb
        return plateau(np.abs(ta), 0.3) * plateau(np.abs(tb), 0.3)
    return F


def left_translate(F, g0, c):
    """h -> F(g0 h) in (a, b) coordinates."""
    def G(A, B):
        return F(g0.a * A, g0.a * B + g0.b * A ** c)
    return G


def left_invariance_defect(c, g0s, F=None, a_range=(1 / 16, 16.0),
                           b_range=(-8.0, 8.0), n=400):
    """max |integral F(g0 h) dh - integral F dh| / |integral F dh|."""
    if F is None:
        F = smooth_group_bump()
    base = haar_integral(F, a_range, b_range, n)
    worst = 0.0
    for g0 in g0s:
        shifted = haar_integral(left_translate(F, g0, c), a_range, b_range, n)
        worst = max(worst, abs(shifted - base) / abs(base))
    return worst


# ---------------------------------------------------------------------------
# frequency windows and the transform
# ---------------------------------------------------------------------------


class FrequencyWindow:
    """Analytic frequency-side window: callable on (n, 2) arrays of xi."""

    def __init__(self, fn, support_shape, blind_spot_margin=0.05):
        self.fn = fn
        self.support_shape = support_shape  # geometry world shape
        lo, hi = _support_box(support_shape)
        if min(abs(lo[0]), abs(hi[0])) < blind_spot_margin and lo[0] * hi[0] <= 0:
            raise ArgumentError(
                "window support touches the blind-spot margin around {xi_1 = 0}")
        self.support_box = (lo, hi)

    def __call__(self, xi):
        return self.fn(np.asarray(xi, dtype=float))

    def sample(self, grid):
        vals = self(grid.freq_points()).reshape(grid.shape).astype(complex)
        return GridFunction(vals, "frequency", grid)

    def norm_l2_sq(self, grid):
        return float(np.sum(np.abs(self.sample(grid).values) ** 2) * grid.dxi ** grid.d)


def _support_box(shape):
    from . import geometry
    return geometry.shape_bounding_box(shape)


def ball_window(center, radius, shrink=0.6, margin=0.05):
    """Smooth bump in an open frequency ball, as an analytic window."""
    from . import geometry
    center = np.asarray(center, dtype=float)

    def fn(xi):
        return plateau(np.linalg.norm(xi - center, axis=-1) / radius, shrink)

    return FrequencyWindow(fn, geometry.WorldShape("ball", (center, radius)), margin)


class WaveletField:
    """Samples W(x, h) for h in a group truncation, x on the spatial grid."""

    def __init__(self, grid, slices, window_id="window"):
        self.grid = grid
        self.slices = slices  # label -> (GroupElement, ndarray over the grid)
        self.window_id = window_id


def wavelet_transform(f, psi, elements, mode="fourier", points=None, quad_stride=1):
    """Generalized wavelet transform of a grid signal.

    fourier mode: for each h the Fourier transform of W(., h) equals
    |det h|^{1/2} fhat(xi) conj(psihat(h^T xi)); the product is inverted on
    the full spatial grid.  direct mode: spatial Riemann quadrature of
    <f, T_x D_h psi> at the requested (x, h) points, with the window
    evaluated semi-analytically from its frequency samples.
    """
    fhat = f.to_frequency()
    grid = fhat.grid
    if mode == "fourier":
        xi = grid.freq_points()
        slices = {}
        for lab, h in elements.items():
            warped = psi(xi @ h.matrix()) if isinstance(psi, FrequencyWindow) \
                else _interp_window(psi, xi @ np.asarray(h.matrix()))
            prod = fhat.values * (h.det() ** 0.5) * np.conj(warped.reshape(grid.shape))
            w = GridFunction(prod, "frequency", grid).to_space()
            slices[lab] = (h, w.values)
        return WaveletField(grid, slices)
    if mode == "direct":
        if points is None:
            raise ArgumentError("direct mode needs explicit (x, h) points")
        out = []
        for x, h in points:
            out.append(_direct_coefficient(fhat, psi, np.asarray(x, float), h,
                                           quad_stride))
        return np.array(out)
    raise ArgumentError("mode must be 'fourier' or 'direct'")


def _interp_window(psi_gf, pts):
    """Bilinear interpolation of a sampled frequency window at off-grid points."""
    g = psi_gf.grid
    vals = np.zeros(pts.shape[0], dtype=complex)
    idx = (pts - g.freq_axis()[0]) / g.dxi
    ok = np.all((idx >= 0) & (idx <= g.N - 1), axis=1)
    ii = idx[ok]
    i0 = np.floor(ii).astype(int)
    frac = ii - i0
    i1 = np.minimum(i0 + 1, g.N - 1)
    v = psi_gf.values
    if g.d != 2:
        raise ArgumentError("window interpolation is implemented for d = 2")
    vals[ok] = (v[i0[:, 0], i0[:, 1]] * (1 - frac[:, 0]) * (1 - frac[:, 1])
                + v[i1[:, 0], i0[:, 1]] * frac[:, 0] * (1 - frac[:, 1])
                + v[i0[:, 0], i1[:, 1]] * (1 - frac[:, 0]) * frac[:, 1]
                + v[i1[:, 0], i1[:, 1]] * frac[:, 0] * frac[:, 1])
    return vals


def _direct_coefficient(fhat, psi, x, h, quad_stride=1):
    """Spatial quadrature of <f, T_x D_h psi> via semi-analytic window values.

    The dilated window is evaluated at the sheared, off-grid points
    h^{-1}(y - x) by summing its frequency content directly, so this path
    shares no FFT with the fourier mode.  ``quad_stride`` subsamples the
    spatial quadrature lattice; the sum stays exact while the integrand's
    bandwidth fits the coarser rate.
    """
    grid = fhat.grid
    xi = grid.freq_points()
    psi_hat = (psi(xi).astype(complex) if isinstance(psi, FrequencyWindow)
               else psi.to_frequency().values.ravel())
    p_sel = np.abs(psi_hat) > 0
    sub = tuple(slice(None, None, quad_stride) for _ in range(grid.d))
    axis = grid.space_axis()[::quad_stride]
    f_space = fhat.to_space().values[sub]
    # atom(y) = |det h|^{-1/2} sum_k psihat_k exp(2 pi i (y - x) . h^{-T} xi_k);
    # the plane waves factor over the spatial lattice axes.
    mu = xi[p_sel] @ h.inv_transpose().T
    coeffs = (psi_hat[p_sel] * grid.dxi ** grid.d
              * np.exp(-2j * np.pi * (mu @ x)))
    waves = [np.exp(2j * np.pi * np.outer(axis, mu[:, ax]))
             for ax in range(grid.d)]
    if grid.d == 1:
        atom = waves[0] @ coeffs
        inner = np.sum(f_space * np.conj(atom))
    elif grid.d == 2:
        g2 = f_space @ np.conj(waves[1])           # (n1, K)
        inner = np.einsum("ak,ak,k->", g2, np.conj(waves[0]), np.conj(coeffs))
    else:
        raise ArgumentError("direct mode is implemented for d <= 2")
    cell = (grid.dx * quad_stride) ** grid.d
    return complex(h.det() ** (-0.5) * inner * cell)


# ---------------------------------------------------------------------------
# mixed norms and the coorbit probe
# ---------------------------------------------------------------------------


def _lq_cell_mass(label, c, delta):
    """integral over the (a, s) cell of the density da ds a^{c-2} / a^{1+c} = a^{-3}."""
    (a_lo, a_hi), (s_lo, s_hi) = shear_cell(label, c, delta)
    return (s_hi - s_lo) * 0.5 * (a_lo ** -2 - a_hi ** -2)


def mixed_norm(field, p, q, m=None, c=None, delta=None):
    """Inner spatial L^p, outer weighted L^q over the group truncation.

    The outer quadrature uses the exact per-cell mass of the measure
    dh / |det h|; p = q with m = 1 collapses to the plain L^p(G) quadrature.
    """
    if m is None:
        m = lambda h: 1.0
    inner = {}
    for lab, (h, w) in field.slices.items():
        inner[lab] = lp_norm(w, p, field.grid.dx ** field.grid.d)
    if q == np.inf:
        return max(m(h) * inner[lab] for lab, (h, _) in field.slices.items())
    if c is None or delta is None:
        raise ArgumentError("finite q needs the group quadrature cells (c, delta)")
    total = 0.0
    for lab, (h, _) in field.slices.items():
        mass = _lq_cell_mass(lab, c, delta)
        total += mass * (m(h) * inner[lab]) ** q
    return float(total ** (1.0 / q))


def power_weight(alpha, beta):
    """h -> |h^{-1}|^alpha |det h|^beta (spectral norm of the inverse)."""
    def m(h):
        inv_norm = float(np.linalg.norm(np.linalg.inv(h.matrix()), 2))
        return inv_norm ** alpha * h.det() ** beta
    return m


def coorbit_decomposition_probe(signals, c, p, q, m=None, delta=1.0,
                                j_range=(-2, 2), k_range=4, grid=None,
                                psi=None, covering=None, bapu=None, weight=None):
    """Ratio of the group-side mixed norm to the covering-side norm per signal.

    Cross-checks the identification of the transform-decay space with the
    decomposition space over the induced covering; reports min/max/spread of
    the ratios over the signal list.
    """
    from . import bapu as bapu_mod
    from . import zoo

    labels, elements = well_spread_family(c, delta, j_range, k_range, validate=False)
    if psi is None:
        psi = ball_window((2.0, 0.0), 1.2)
    if covering is None:
        covering = zoo.make_shearlet_induced(c, delta, j_range, k_range)
    if weight is None:
        weight = zoo.make_weight({"generator": "coorbit", "q": q,
                                  "alpha": 0.0, "beta": 0.0}, covering)
    if bapu is None:
        if grid is None:
            grid = signals[0].grid
        bapu = bapu_mod.build_bapu(covering, grid, shrink=0.7)
    ratios = []
    for f in signals:
        field = wavelet_transform(f, psi, elements, mode="fourier")
        lhs = mixed_norm(field, p, q, m, c=c, delta=delta)
        rhs = bapu_mod.decomposition_norm(f, covering, bapu, p, q, weight)
        ratios.append(lhs / rhs)
    ratios = np.array(ratios)
    return {"ratios": ratios.tolist(), "min": float(ratios.min()),
            "max": float(ratios.max()),
            "spread": float(ratios.max() / ratios.min())}
