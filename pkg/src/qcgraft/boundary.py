"""Almost-isometry bookkeeping for interval maps, the Beurling-Ahlfors
averaging extension of a line homeomorphism, and the subdivision-based
extension of a good rectangle-boundary map to an almost-conformal map.

An interval map between arclength-parametrized arcs earns an (eps, C)
certificate when its derivative stays within eps of 1 and every tested
sub-interval changes length by at most the additive error C.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .planemaps import PlanarC1Map, RectDomain, scan_dilatation

__all__ = [
    "IntervalMap",
    "AlmostIsometryCert",
    "AlmostIsometryViolation",
    "check_almost_isometry",
    "measure_almost_isometry",
    "compose_certs",
    "invert_cert",
    "concat_cert",
    "PiecewiseLinearHomeo",
    "beurling_ahlfors_extend",
    "RectBoundaryMap",
    "extend_rect_boundary",
    "PieceUnionDomain",
]

DYADIC_DEPTH = 10  # sub-interval resolution used by the additive-error check


@dataclass
class IntervalMap:
    """Monotone C1 map [0, length_in] -> [0, length_out], endpoints fixed to
    endpoints, with vectorized value and derivative callables."""

    length_in: float
    length_out: float
    fn: Callable[[np.ndarray], np.ndarray]
    dfn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, s):
        return np.asarray(self.fn(np.asarray(s, float)), float)

    def deriv(self, s):
        return np.asarray(self.dfn(np.asarray(s, float)), float)

    @staticmethod
    def identity(length: float) -> "IntervalMap":
        return IntervalMap(length, length, lambda s: s, lambda s: np.ones_like(s))

    @staticmethod
    def affine(l1: float, l2: float) -> "IntervalMap":
        r = l2 / l1
        return IntervalMap(l1, l2, lambda s: r * s, lambda s: np.full_like(s, r))

    @staticmethod
    def from_samples(s: np.ndarray, values: np.ndarray) -> "IntervalMap":
        s = np.asarray(s, float)
        values = np.asarray(values, float)
        if np.any(np.diff(values) <= 0):
            raise ValueError("sampled values must be strictly increasing")
        slopes = np.diff(values) / np.diff(s)

        def fn(t):
            return np.interp(t, s, values)

        def dfn(t):
            idx = np.clip(np.searchsorted(s, t, side="right") - 1, 0, len(slopes) - 1)
            return slopes[idx]

        return IntervalMap(float(s[-1] - s[0]), float(values[-1] - values[0]), fn, dfn)

    def scaled(self, factor: float) -> "IntervalMap":
        """Conjugate by s -> factor * s on both ends."""
        f, df = self.fn, self.dfn
        return IntervalMap(
            self.length_in * factor,
            self.length_out * factor,
            lambda s: factor * np.asarray(f(np.asarray(s, float) / factor), float),
            lambda s: np.asarray(df(np.asarray(s, float) / factor), float),
        )


@dataclass(frozen=True)
class AlmostIsometryCert:
    """Certificate that a map is an (eps, C)-almost-isometry.

    eps bounds |derivative - 1|; C bounds the additive length error of every
    tested sub-interval; witness records the worst sub-interval found."""

    eps: float
    C: float
    witness: tuple = (0.0, 0.0)


class AlmostIsometryViolation(ValueError):
    def __init__(self, msg: str, where):
        super().__init__(msg)
        self.where = where


def measure_almost_isometry(f: IntervalMap, depth: int = DYADIC_DEPTH) -> AlmostIsometryCert:
    """Measured (eps, C) of an interval map over the dyadic grid at the given
    depth.  The worst additive error over all sub-intervals with dyadic
    endpoints is max - min of the displacement f(s) - s."""
    n = (1 << depth) + 1
    s = np.linspace(0.0, f.length_in, n)
    disp = f(s) - s
    i_hi = int(np.argmax(disp))
    i_lo = int(np.argmin(disp))
    C = float(disp[i_hi] - disp[i_lo])
    eps = float(np.max(np.abs(f.deriv(s) - 1.0)))
    a, b = sorted((s[i_lo], s[i_hi]))
    return AlmostIsometryCert(eps=eps, C=C, witness=(float(a), float(b)))


def check_almost_isometry(
    f: IntervalMap, eps: float, C: float, depth: int = DYADIC_DEPTH
) -> AlmostIsometryCert:
    """Verify an (eps, C)-almost-isometry claim; returns the measured cert or
    raises AlmostIsometryViolation carrying the failing sample/sub-interval."""
    n = (1 << depth) + 1
    s = np.linspace(0.0, f.length_in, n)
    d = f.deriv(s)
    bad = np.abs(d - 1.0) > eps + 1e-12
    if np.any(bad):
        i = int(np.argmax(np.abs(d - 1.0)))
        raise AlmostIsometryViolation(
            f"dilatation |d-1| = {abs(d[i]-1):.6g} > eps = {eps} at s = {s[i]:.6g}",
            where=float(s[i]),
        )
    m = measure_almost_isometry(f, depth)
    if m.C > C + 1e-12:
        raise AlmostIsometryViolation(
            f"additive error {m.C:.6g} > C = {C} on sub-interval {m.witness}",
            where=m.witness,
        )
    return AlmostIsometryCert(eps=eps, C=C, witness=m.witness)


def compose_certs(a: AlmostIsometryCert, b: AlmostIsometryCert) -> AlmostIsometryCert:
    """Cert for the composition of two certified maps: additive errors add,
    multiplicative slacks combine as (1+e1)(1+e2) - 1."""
    return AlmostIsometryCert(
        eps=a.eps + b.eps + a.eps * b.eps, C=a.C + b.C, witness=a.witness
    )


def invert_cert(c: AlmostIsometryCert) -> AlmostIsometryCert:
    """Cert for the inverse map: same additive error, slack eps/(1-eps)
    (bounded by 2 eps while eps <= 1/2)."""
    if c.eps >= 1.0:
        raise ValueError("inverse cert undefined for eps >= 1")
    return AlmostIsometryCert(eps=c.eps / (1.0 - c.eps), C=c.C, witness=c.witness)


def concat_cert(certs: Sequence[AlmostIsometryCert]) -> AlmostIsometryCert:
    """Cert for a concatenation of certified pieces: slack is the max, the
    additive errors add across the N pieces."""
    return AlmostIsometryCert(
        eps=max(c.eps for c in certs), C=sum(c.C for c in certs),
        witness=certs[0].witness if certs else (0.0, 0.0),
    )


# ---------------------------------------------------------------------------
# Beurling-Ahlfors extension
# ---------------------------------------------------------------------------


class PiecewiseLinearHomeo:
    """Increasing piecewise-linear homeomorphism of the real line, linear
    beyond the terminal knots.  Integrals are exact (piecewise quadratic
    antiderivative), which makes the averaging extension exact too."""

    def __init__(self, knots: Sequence[float], values: Sequence[float]):
        self.x = np.asarray(knots, float)
        self.y = np.asarray(values, float)
        if self.x.ndim != 1 or len(self.x) < 2:
            raise ValueError("need at least two knots")
        if np.any(np.diff(self.x) <= 0) or np.any(np.diff(self.y) <= 0):
            raise ValueError("knots and values must be strictly increasing")
        self.slopes = np.diff(self.y) / np.diff(self.x)
        # cumulative exact integral of h from x[0] to each knot
        seg = 0.5 * (self.y[:-1] + self.y[1:]) * np.diff(self.x)
        self.cum = np.concatenate([[0.0], np.cumsum(seg)])

    def __call__(self, s):
        s = np.asarray(s, float)
        lo_slope, hi_slope = self.slopes[0], self.slopes[-1]
        out = np.interp(s, self.x, self.y)
        below = s < self.x[0]
        above = s > self.x[-1]
        out = np.where(below, self.y[0] + lo_slope * (s - self.x[0]), out)
        out = np.where(above, self.y[-1] + hi_slope * (s - self.x[-1]), out)
        return out

    def antiderivative(self, s):
        """Exact antiderivative H with H(x0) = 0, vectorized."""
        s = np.asarray(s, float)
        idx = np.clip(np.searchsorted(self.x, s, side="right") - 1, 0, len(self.slopes) - 1)
        x0 = self.x[idx]
        y0 = self.y[idx]
        m = self.slopes[idx]
        d = s - x0
        inside = self.cum[idx] + y0 * d + 0.5 * m * d * d
        below = s < self.x[0]
        above = s > self.x[-1]
        d_lo = s - self.x[0]
        d_hi = s - self.x[-1]
        lo_val = self.y[0] * d_lo + 0.5 * self.slopes[0] * d_lo * d_lo
        hi_val = self.cum[-1] + self.y[-1] * d_hi + 0.5 * self.slopes[-1] * d_hi * d_hi
        return np.where(below, lo_val, np.where(above, hi_val, inside))

    def integral(self, a, b):
        return self.antiderivative(b) - self.antiderivative(a)


class _NumericHomeo:
    """Wrap a plain callable with a fixed-order Gauss-Legendre integral."""

    _NODES, _WEIGHTS = np.polynomial.legendre.leggauss(48)

    def __init__(self, fn):
        self.fn = fn

    def __call__(self, s):
        return np.asarray(self.fn(np.asarray(s, float)), float)

    def integral(self, a, b):
        a = np.asarray(a, float)
        b = np.asarray(b, float)
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        vals = self.fn(mid[..., None] + half[..., None] * self._NODES)
        return half * np.dot(np.asarray(vals, float), self._WEIGHTS)


def _quasisymmetry_estimate(h, x_lo, x_hi, n=64) -> float:
    xs = np.linspace(x_lo, x_hi, n)
    M = 1.0
    for t in (x_hi - x_lo) * np.array([0.01, 0.05, 0.1, 0.25]):
        num = h(xs + t) - h(xs)
        den = h(xs) - h(xs - t)
        if np.any(den <= 0) or np.any(num <= 0):
            raise ValueError("input is not strictly increasing")
        r = num / den
        M = max(M, float(np.max(r)), float(np.max(1.0 / r)))
    return M


def beurling_ahlfors_extend(
    h,
    window: tuple = (-1.0, 2.0, 1.0),
    name: str = "ba-extension",
) -> PlanarC1Map:
    """Extend an increasing line homeomorphism to the upper half-plane by the
    averaging construction

        u(x, y) = 1/2 * integral_0^1 [h(x+ty) + h(x-ty)] dt
        v(x, y) =       integral_0^1 [h(x+ty) - h(x-ty)] dt,

    normalized so the identity extends to the identity.  Boundary values are
    h on the real line exactly (v(x, 0) = 0).  ``h`` may be a
    PiecewiseLinearHomeo (integrated exactly) or any increasing callable.

    ``window`` = (x0, x1, y_max) fixes the default scan region.
    """
    homeo = h if hasattr(h, "integral") else _NumericHomeo(h)
    x0, x1, y_max = window
    M = _quasisymmetry_estimate(homeo, x0, x1)

    def ev(P):
        P = np.asarray(P, float)
        x, y = P[..., 0], P[..., 1]
        y_safe = np.where(np.abs(y) < 1e-300, 1e-300, y)
        Ia = homeo.integral(x - y, x)  # int over [x-y, x]
        Ib = homeo.integral(x, x + y)
        u = (Ia + Ib) / (2 * y_safe)
        v = (Ib - Ia) / y_safe
        u = np.where(np.abs(y) < 1e-300, homeo(x), u)
        v = np.where(np.abs(y) < 1e-300, 0.0, v)
        return np.stack([u, v], axis=-1)

    def pt(P):
        P = np.asarray(P, float)
        x, y = P[..., 0], P[..., 1]
        y_safe = np.maximum(y, 1e-12)
        hp = homeo(x + y_safe)
        hm = homeo(x - y_safe)
        h0 = homeo(x)
        E = ev(np.stack([x, y_safe], axis=-1))
        u, v = E[..., 0], E[..., 1]
        u_x = (hp - hm) / (2 * y_safe)
        u_y = (hp + hm) / (2 * y_safe) - u / y_safe
        v_x = (hp - 2 * h0 + hm) / y_safe
        v_y = (hp - hm) / y_safe - v / y_safe
        fx = np.stack([u_x, v_x], axis=-1)
        fy = np.stack([u_y, v_y], axis=-1)
        return fx, fy

    m = PlanarC1Map(
        domain=RectDomain(x0, x1, 1e-6, y_max),
        evaluate=ev,
        partials_fn=pt,
        name=name,
    )
    m.meta["quasisymmetry_M"] = M
    return m


# ---------------------------------------------------------------------------
# rectangle-boundary extension
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RectBoundaryMap:
    """Vertex-preserving boundary map between two rectangles of equal height:
    vertical edges by isometries, horizontal edges by the given interval maps
    (parametrized left-to-right by arclength)."""

    bottom: IntervalMap
    top: IntervalMap
    height: float

    def __post_init__(self):
        for edge in (self.bottom, self.top):
            ends = edge(np.array([0.0, edge.length_in]))
            if abs(ends[0]) > 1e-9 or abs(ends[1] - edge.length_out) > 1e-9:
                raise ValueError("edge maps must fix the vertices")
        if abs(self.bottom.length_in - self.top.length_in) > 1e-9:
            raise ValueError("top and bottom source edges must have equal length")
        if abs(self.bottom.length_out - self.top.length_out) > 1e-9:
            raise ValueError("top and bottom image edges must have equal length")

    @staticmethod
    def identity(width: float, height: float) -> "RectBoundaryMap":
        return RectBoundaryMap(
            bottom=IntervalMap.identity(width),
            top=IntervalMap.identity(width),
            height=height,
        )


@dataclass(frozen=True)
class PieceUnionDomain:
    """Union of axis-aligned rectangles sampled piece by piece, keeping scan
    points away from the separator skeleton."""

    pieces: tuple

    def sample(self, nx: int = 200, ny: int = 200, margin: float = 1e-3) -> np.ndarray:
        per = max(nx // max(len(self.pieces), 1), 8)
        return np.concatenate(
            [RectDomain(*p).sample(per, ny, margin) for p in self.pieces], axis=0
        )

    def contains(self, P):
        P = np.asarray(P, float)
        out = np.zeros(P.shape[:-1], dtype=bool)
        for p in self.pieces:
            out |= RectDomain(*p).contains(P)
        return out


def _greedy_subdivision(total: float) -> list:
    """Separator abscissae cutting [0, total] into pieces of length in [1, 2]
    (unit height assumed); greedy left-to-right, largest admissible last cut."""
    if total <= 2.0:
        return [0.0, total]
    cuts = [0.0]
    remaining = total
    while remaining > 2.0:
        step = 2.0 if remaining - 2.0 >= 1.0 else remaining - 1.0
        cuts.append(cuts[-1] + step)
        remaining -= step
    cuts.append(total)
    return cuts


def extend_rect_boundary(
    f: RectBoundaryMap,
    R1: tuple,
    R2: tuple,
    eps: Optional[float] = None,
    C: Optional[float] = None,
) -> PlanarC1Map:
    """Extend a good boundary map between euclidean rectangles of equal
    height to an almost-conformal map of the interiors.

    Pipeline: rescale to unit height; subdivide the source into sub-rectangles
    of modulus in [1, 2]; map separators affinely onto the segments joining
    their image endpoints (almost-vertical when the certs hold); straighten
    each piece by affine horizontal interpolation; absorb the remaining
    horizontal-edge error by a vertically blended reparametrization pinned on
    all four edges.  The result equals the input on the whole boundary.

    When eps and C are given the horizontal edges are validated against the
    (eps, C) certificate first.
    """
    w1, h1 = R1
    w2, h2 = R2
    if abs(h1 - h2) > 1e-12:
        raise ValueError("rectangles must have equal heights")
    h = h1
    if w1 / h <= 1.0 or w2 / h <= 1.0:
        raise ValueError("both moduli must exceed 1")
    if abs(f.bottom.length_in - w1) > 1e-9 or abs(f.bottom.length_out - w2) > 1e-9:
        raise ValueError("edge maps do not match the rectangle widths")
    if eps is not None and C is not None:
        if C / h > eps + 1e-12:
            raise ValueError(f"cert invalid: C/h = {C / h:.6g} exceeds eps = {eps}")
        check_almost_isometry(f.bottom, eps, C)
        check_almost_isometry(f.top, eps, C)

    # rescaled data (height 1)
    fb = f.bottom.scaled(1.0 / h)
    ft = f.top.scaled(1.0 / h)
    m1 = w1 / h
    cuts = np.asarray(_greedy_subdivision(m1))
    n_pieces = len(cuts) - 1
    fb_c = fb(cuts)
    ft_c = ft(cuts)
    widths_src = np.diff(cuts)
    submoduli = widths_src / 1.0

    def _piece(x):
        return np.clip(np.searchsorted(cuts, x, side="right") - 1, 0, n_pieces - 1)

    def _blend(x, y):
        """Pinned reparametrization B and its partials, vectorized."""
        i = _piece(x)
        s0, s1 = cuts[i], cuts[i + 1]
        dx = s1 - s0
        b0, b1 = fb_c[i], fb_c[i + 1]
        t0, t1 = ft_c[i], ft_c[i + 1]
        beta_b = s0 + dx * (fb(x) - b0) / (b1 - b0)
        beta_t = s0 + dx * (ft(x) - t0) / (t1 - t0)
        dbeta_b = dx * fb.deriv(x) / (b1 - b0)
        dbeta_t = dx * ft.deriv(x) / (t1 - t0)
        bx = (1.0 - y) * beta_b + y * beta_t
        d_bx_dx = (1.0 - y) * dbeta_b + y * dbeta_t
        d_bx_dy = beta_t - beta_b
        return i, bx, d_bx_dx, d_bx_dy

    def _phi(i, x, y):
        """Affine-in-x interpolation of the separator segments, + partials."""
        s0, s1 = cuts[i], cuts[i + 1]
        dx = s1 - s0
        g0 = fb_c[i] + y * (ft_c[i] - fb_c[i])
        g1 = fb_c[i + 1] + y * (ft_c[i + 1] - fb_c[i + 1])
        t = (x - s0) / dx
        u = g0 + t * (g1 - g0)
        du_dx = (g1 - g0) / dx
        dg0 = ft_c[i] - fb_c[i]
        dg1 = ft_c[i + 1] - fb_c[i + 1]
        du_dy = dg0 + t * (dg1 - dg0)
        return u, du_dx, du_dy

    def ev(P):
        P = np.asarray(P, float)
        x = P[..., 0] / h
        y = P[..., 1] / h
        i, bx, _, _ = _blend(x, y)
        u, _, _ = _phi(i, bx, y)
        return np.stack([u * h, y * h], axis=-1)

    def pt(P):
        P = np.asarray(P, float)
        x = P[..., 0] / h
        y = P[..., 1] / h
        i, bx, dbx_dx, dbx_dy = _blend(x, y)
        _, du_dx, du_dy = _phi(i, bx, y)
        # chain rule through B, then undo the h-scaling (conjugation by a
        # dilation leaves the Jacobian entries unchanged)
        u_x = du_dx * dbx_dx
        u_y = du_dx * dbx_dy + du_dy
        fx = np.stack([u_x, np.zeros_like(u_x)], axis=-1)
        fy = np.stack([u_y, np.ones_like(u_y)], axis=-1)
        return fx, fy

    pieces = tuple((c0 * h, c1 * h, 0.0, h) for c0, c1 in zip(cuts[:-1], cuts[1:]))
    m = PlanarC1Map(
        domain=PieceUnionDomain(pieces),
        evaluate=ev,
        partials_fn=pt,
        name="rect-boundary-extension",
    )
    m.meta["separators"] = [float(c * h) for c in cuts]
    m.meta["submoduli"] = [float(s) for s in submoduli]
    return m
