"""Planar C1 maps with a numerical dilatation meter, plus the explicit
almost-conformal constructors used throughout: horocyclic straightening,
the crescent isometry, horizontal/vertical restretching, and sector
straightening.

Conventions: a map is stored as vectorized callables on (..., 2) float
arrays.  The Beltrami coefficient is mu = f_zbar / f_z with
f_z = (f_x - i f_y)/2 treating the image as complex, and the dilatation
is reported in the orientation with K = (1 + |mu|)/(1 - |mu|) >= 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .halfplane import GeodesicArc, ThinRectangle, TruncatedSector

__all__ = [
    "OrientationError",
    "RectDomain",
    "SlabDomain",
    "AnnularSectorDomain",
    "GraphBoundedRegion",
    "VerticalGraphRegion",
    "SectorDomain",
    "PlanarC1Map",
    "DilatationReport",
    "dilatation_at",
    "scan_dilatation",
    "straighten_horocyclic",
    "sector_to_rect",
    "restretch_horizontal",
    "restretch_vertical",
    "straighten_sector",
]

DEFAULT_FD_STEP = 1e-5


class OrientationError(ValueError):
    """Degenerate or orientation-reversing Jacobian (|f_z| <= |f_zbar|)."""


def _as_points(P) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.shape[-1] != 2:
        raise ValueError("points must have trailing dimension 2")
    return P


# ---------------------------------------------------------------------------
# domains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RectDomain:
    x0: float
    x1: float
    y0: float
    y1: float

    def contains(self, P) -> np.ndarray:
        P = _as_points(P)
        return (
            (P[..., 0] >= self.x0)
            & (P[..., 0] <= self.x1)
            & (P[..., 1] >= self.y0)
            & (P[..., 1] <= self.y1)
        )

    def sample(self, nx: int = 200, ny: int = 200, margin: float = 1e-3) -> np.ndarray:
        mx = (self.x1 - self.x0) * margin
        my = (self.y1 - self.y0) * margin
        xs = np.linspace(self.x0 + mx, self.x1 - mx, nx)
        ys = np.linspace(self.y0 + my, self.y1 - my, ny)
        X, Y = np.meshgrid(xs, ys)
        return np.stack([X.ravel(), Y.ravel()], axis=-1)


@dataclass(frozen=True)
class SlabDomain:
    """Half-plane region between two geodesic arcs over [y_low, y_high]."""

    left: GeodesicArc
    right: GeodesicArc
    y_low: float
    y_high: float

    def sample(self, nx: int = 200, ny: int = 200, margin: float = 1e-3) -> np.ndarray:
        ys = np.linspace(self.y_low, self.y_high, ny + 2)[1:-1]
        rows = []
        for y in ys:
            xl = self.left.x_at_height(y)
            xr = self.right.x_at_height(y)
            m = (xr - xl) * margin
            xs = np.linspace(xl + m, xr - m, nx)
            rows.append(np.stack([xs, np.full(nx, y)], axis=-1))
        return np.concatenate(rows, axis=0)

    def contains(self, P) -> np.ndarray:
        P = _as_points(P)
        out = np.zeros(P.shape[:-1], dtype=bool)
        flat = P.reshape(-1, 2)
        res = np.zeros(len(flat), dtype=bool)
        for i, (x, y) in enumerate(flat):
            if not (self.y_low <= y <= self.y_high):
                continue
            try:
                res[i] = self.left.x_at_height(y) <= x <= self.right.x_at_height(y)
            except ValueError:
                res[i] = False
        return res.reshape(out.shape)


@dataclass(frozen=True)
class AnnularSectorDomain:
    """{a <= |z| <= b, alpha <= arg z <= pi/2}."""

    a: float
    b: float
    alpha: float

    def sample(self, nx: int = 200, ny: int = 200, margin: float = 1e-3) -> np.ndarray:
        dr = (self.b - self.a) * margin
        dth = (math.pi / 2 - self.alpha) * margin
        rs = np.linspace(self.a + dr, self.b - dr, ny)
        ths = np.linspace(self.alpha + dth, math.pi / 2 - dth, nx)
        R, T = np.meshgrid(rs, ths)
        return np.stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()], axis=-1)

    def contains(self, P) -> np.ndarray:
        P = _as_points(P)
        r = np.hypot(P[..., 0], P[..., 1])
        th = np.arctan2(P[..., 1], P[..., 0])
        return (r >= self.a) & (r <= self.b) & (th >= self.alpha) & (th <= math.pi / 2)


@dataclass(frozen=True)
class GraphBoundedRegion:
    """Region between the graphs x = g1(y) and x = g2(y) over 0 <= y <= a,
    with g2 > g1 > 0.  Derivatives may be supplied; otherwise they are taken
    by central differences.
    """

    g1: Callable[[np.ndarray], np.ndarray]
    g2: Callable[[np.ndarray], np.ndarray]
    a: float
    dg1: Optional[Callable[[np.ndarray], np.ndarray]] = None
    dg2: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        ys = np.linspace(0.0, self.a, 257)
        lo, hi = np.asarray(self.g1(ys), float), np.asarray(self.g2(ys), float)
        if not np.all(hi > lo):
            raise ValueError("need g2(y) > g1(y) throughout")
        if not np.all(lo > 0):
            raise ValueError("need g1(y) > 0 throughout")

    def d_g1(self, ys):
        if self.dg1 is not None:
            return np.asarray(self.dg1(ys), float)
        h = 1e-6
        return (np.asarray(self.g1(ys + h), float) - np.asarray(self.g1(ys - h), float)) / (2 * h)

    def d_g2(self, ys):
        if self.dg2 is not None:
            return np.asarray(self.dg2(ys), float)
        h = 1e-6
        return (np.asarray(self.g2(ys + h), float) - np.asarray(self.g2(ys - h), float)) / (2 * h)

    def width_sup(self, n: int = 2049) -> float:
        ys = np.linspace(0.0, self.a, n)
        return float(np.max(np.asarray(self.g2(ys)) - np.asarray(self.g1(ys))))

    def sample(self, nx: int = 200, ny: int = 200, margin: float = 1e-3) -> np.ndarray:
        ys = np.linspace(0.0, self.a, ny + 2)[1:-1]
        lo = np.asarray(self.g1(ys), float)
        hi = np.asarray(self.g2(ys), float)
        t = np.linspace(margin, 1.0 - margin, nx)
        X = lo[:, None] + t[None, :] * (hi - lo)[:, None]
        Y = np.broadcast_to(ys[:, None], X.shape)
        return np.stack([X.ravel(), Y.ravel()], axis=-1)

    def contains(self, P) -> np.ndarray:
        P = _as_points(P)
        y = P[..., 1]
        ok = (y >= 0) & (y <= self.a)
        lo = np.asarray(self.g1(np.clip(y, 0, self.a)), float)
        hi = np.asarray(self.g2(np.clip(y, 0, self.a)), float)
        return ok & (P[..., 0] >= lo) & (P[..., 0] <= hi)


@dataclass(frozen=True)
class VerticalGraphRegion:
    """Region between the graphs y = g1(x) and y = g2(x) over 0 <= x <= w,
    bounded left and right by vertical segments."""

    g1: Callable[[np.ndarray], np.ndarray]
    g2: Callable[[np.ndarray], np.ndarray]
    w: float
    dg1: Optional[Callable[[np.ndarray], np.ndarray]] = None
    dg2: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def d_g1(self, xs):
        if self.dg1 is not None:
            return np.asarray(self.dg1(xs), float)
        h = 1e-6
        return (np.asarray(self.g1(xs + h), float) - np.asarray(self.g1(xs - h), float)) / (2 * h)

    def d_g2(self, xs):
        if self.dg2 is not None:
            return np.asarray(self.dg2(xs), float)
        h = 1e-6
        return (np.asarray(self.g2(xs + h), float) - np.asarray(self.g2(xs - h), float)) / (2 * h)

    def sample(self, nx: int = 200, ny: int = 200, margin: float = 1e-3) -> np.ndarray:
        xs = np.linspace(0.0, self.w, nx + 2)[1:-1]
        lo = np.asarray(self.g1(xs), float)
        hi = np.asarray(self.g2(xs), float)
        t = np.linspace(margin, 1.0 - margin, ny)
        Y = lo[None, :] + t[:, None] * (hi - lo)[None, :]
        X = np.broadcast_to(xs[None, :], Y.shape)
        return np.stack([X.ravel(), Y.ravel()], axis=-1)

    def contains(self, P) -> np.ndarray:
        P = _as_points(P)
        x = P[..., 0]
        ok = (x >= 0) & (x <= self.w)
        lo = np.asarray(self.g1(np.clip(x, 0, self.w)), float)
        hi = np.asarray(self.g2(np.clip(x, 0, self.w)), float)
        return ok & (P[..., 1] >= lo) & (P[..., 1] <= hi)


@dataclass(frozen=True)
class SectorDomain:
    """Scan window of a truncated sector: horocyclic-zone rows at heights
    h_min <= h <= h_max (positive heights; the reflected half carries
    identical dilatation by symmetry)."""

    sector: TruncatedSector
    h_min: float
    h_max: float

    def sample(self, nx: int = 200, ny: int = 200, margin: float = 1e-3) -> np.ndarray:
        hs = np.linspace(self.h_min, self.h_max, ny)
        rows = []
        for h in hs:
            y = math.exp(h)
            xs = np.linspace(-0.5 * (1 - margin), -0.5 * margin, nx)
            rows.append(np.stack([xs, np.full(nx, y)], axis=-1))
        return np.concatenate(rows, axis=0)

    def contains(self, P) -> np.ndarray:
        P = _as_points(P)
        flat = P.reshape(-1, 2)
        res = np.array([self.sector.contains(complex(x, y)) for x, y in flat])
        return res.reshape(P.shape[:-1])


# ---------------------------------------------------------------------------
# the map object and its dilatation
# ---------------------------------------------------------------------------


@dataclass
class PlanarC1Map:
    """Orientation-preserving C1 planar map given by vectorized evaluation
    and (optionally) analytic partials; finite differences with a documented
    step fill in when partials are absent."""

    domain: object
    evaluate: Callable[[np.ndarray], np.ndarray]
    partials_fn: Optional[Callable[[np.ndarray], tuple]] = None
    fd_step: float = DEFAULT_FD_STEP
    name: str = "map"
    inverse: Optional[Callable[[np.ndarray], np.ndarray]] = None
    meta: dict = field(default_factory=dict)

    def __call__(self, P) -> np.ndarray:
        return self.evaluate(_as_points(P))

    def partials(self, P) -> tuple:
        """Return (f_x, f_y), each shaped like the input points."""
        P = _as_points(P)
        if self.partials_fn is not None:
            return self.partials_fn(P)
        h = self.fd_step
        ex = np.zeros_like(P)
        ex[..., 0] = h
        ey = np.zeros_like(P)
        ey[..., 1] = h
        fx = (self.evaluate(P + ex) - self.evaluate(P - ex)) / (2 * h)
        fy = (self.evaluate(P + ey) - self.evaluate(P - ey)) / (2 * h)
        return fx, fy

    def then(self, other: "PlanarC1Map", name: Optional[str] = None) -> "PlanarC1Map":
        """Composition other(self(.)) with chain-ruled partials."""

        def ev(P):
            return other.evaluate(self.evaluate(P))

        def pt(P):
            fx, fy = self.partials(P)
            Q = self.evaluate(P)
            gx, gy = other.partials(Q)
            # columns of D(other o self): Dg . Df applied to basis vectors
            cx = gx * fx[..., 0:1] + gy * fx[..., 1:2]
            cy = gx * fy[..., 0:1] + gy * fy[..., 1:2]
            return cx, cy

        inv = None
        if self.inverse is not None and other.inverse is not None:
            s_inv, o_inv = self.inverse, other.inverse

            def inv(Q):
                return s_inv(o_inv(Q))

        return PlanarC1Map(
            domain=self.domain,
            evaluate=ev,
            partials_fn=pt,
            name=name or f"{other.name}*{self.name}",
            inverse=inv,
        )

    @staticmethod
    def identity(domain) -> "PlanarC1Map":
        def ev(P):
            return np.array(P, dtype=float, copy=True)

        def pt(P):
            fx = np.zeros_like(np.asarray(P, float))
            fy = np.zeros_like(fx)
            fx[..., 0] = 1.0
            fy[..., 1] = 1.0
            return fx, fy

        return PlanarC1Map(domain, ev, pt, name="identity", inverse=lambda Q: np.array(Q, copy=True))


def _mu_K_from_partials(fx, fy, strict: bool = True):
    wx = fx[..., 0] + 1j * fx[..., 1]
    wy = fy[..., 0] + 1j * fy[..., 1]
    fz = 0.5 * (wx - 1j * wy)
    fzb = 0.5 * (wx + 1j * wy)
    az, azb = np.abs(fz), np.abs(fzb)
    if strict and np.any(az <= azb):
        bad = np.argmax(azb - az)
        raise OrientationError(
            f"orientation failure: |f_z|={az.ravel()[bad]:.3e} <= |f_zbar|={azb.ravel()[bad]:.3e}"
        )
    mu = np.where(az > 0, fzb / np.where(az > 0, fz, 1.0), 0.0)
    m = np.abs(mu)
    K = (1.0 + m) / np.maximum(1.0 - m, 1e-300)
    return mu, K


def dilatation_at(m: PlanarC1Map, p) -> tuple:
    """Beltrami coefficient and pointwise dilatation of m at p.

    Returns (mu, K) with K = (1+|mu|)/(1-|mu|) >= 1.  Raises
    OrientationError when the Jacobian is degenerate or reversing.
    """
    P = _as_points(p)
    scalar = P.ndim == 1
    if scalar:
        P = P[None, :]
    fx, fy = m.partials(P)
    mu, K = _mu_K_from_partials(fx, fy)
    if scalar:
        return complex(mu[0]), float(K[0])
    return mu, K


@dataclass
class DilatationReport:
    """Grid scan of pointwise dilatation over a map's domain."""

    name: str
    points: np.ndarray
    mu_field: np.ndarray
    K_field: np.ndarray
    grid: dict
    K_max: float = field(init=False)

    def __post_init__(self):
        self.K_max = float(np.max(self.K_field)) if self.K_field.size else 1.0

    def argmax_point(self) -> np.ndarray:
        return self.points[int(np.argmax(self.K_field))]

    def to_csv(self, path) -> None:
        from .serialize import write_csv

        rows = [
            (float(p[0]), float(p[1]), float(abs(m)), float(k))
            for p, m, k in zip(self.points, self.mu_field, self.K_field)
        ]
        write_csv(path, ["x", "y", "abs_mu", "K"], rows)

    def summary(self) -> dict:
        return {
            "name": self.name,
            "K_max": self.K_max,
            "mu_max": float(np.max(np.abs(self.mu_field))) if self.mu_field.size else 0.0,
            "samples": int(self.K_field.size),
            "grid": self.grid,
        }


def scan_dilatation(
    m: PlanarC1Map,
    nx: int = 200,
    ny: int = 200,
    margin: float = 1e-3,
    points: Optional[np.ndarray] = None,
) -> DilatationReport:
    """Evaluate pointwise dilatation on an interior sample grid.

    The grid excludes the domain boundary (and with it any measure-zero
    interface skeleton) by the given relative margin.
    """
    if points is None:
        points = m.domain.sample(nx=nx, ny=ny, margin=margin)
    fx, fy = m.partials(points)
    mu, K = _mu_K_from_partials(fx, fy)
    return DilatationReport(
        name=m.name,
        points=points,
        mu_field=mu,
        K_field=K,
        grid={"nx": nx, "ny": ny, "margin": margin, "mode": "custom" if points is not None else "grid"},
    )


# ---------------------------------------------------------------------------
# explicit constructors
# ---------------------------------------------------------------------------


def straighten_horocyclic(R: ThinRectangle, side: str = "left") -> PlanarC1Map:
    """Map of a thin half-plane rectangle that pins the chosen geodesic edge
    to a vertical segment, sends every horocyclic leaf to a horizontal line,
    and preserves length along each leaf: (x, y) -> ((x - c)/y, ln y).

    The opposite edge lands on an almost-vertical graph; the pointwise
    dilatation is 1 + O(hyperbolic width).
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if abs(R.y_low - 1.0) > 1e-12:
        raise ValueError("rectangle must be normalized with bottom leaf at y = 1")
    if side == "right" and R.height <= 1.0:
        raise ValueError("right-pinned straightening needs height > 1")
    pin = R.left if side == "left" else R.right
    c = pin.c

    def ev(P):
        P = _as_points(P)
        x, y = P[..., 0], P[..., 1]
        return np.stack([(x - c) / y, np.log(y)], axis=-1)

    def pt(P):
        P = _as_points(P)
        x, y = P[..., 0], P[..., 1]
        fx = np.stack([1.0 / y, np.zeros_like(y)], axis=-1)
        fy = np.stack([-(x - c) / (y * y), 1.0 / y], axis=-1)
        return fx, fy

    def inv(Q):
        Q = _as_points(Q)
        u, v = Q[..., 0], Q[..., 1]
        y = np.exp(v)
        return np.stack([u * y + c, y], axis=-1)

    return PlanarC1Map(
        domain=SlabDomain(R.left, R.right, R.y_low, R.y_high),
        evaluate=ev,
        partials_fn=pt,
        name=f"straighten[{side}]",
        inverse=inv,
    )


def sector_to_rect(a: float, b: float, alpha: float) -> PlanarC1Map:
    """Exact isometry of the crescent {a <= |z| <= b, alpha <= arg z <= pi/2}
    with metric |dz|/|z| onto [0, pi/2 - alpha] x [ln a, ln b], sending each
    leaf |z| = l to a horizontal line length-preservingly: z -> pi/2 + i ln z
    read as (pi/2 - arg z, ln |z|).  Holomorphic, so mu vanishes identically.
    """
    if not (0.0 < a < b):
        raise ValueError("need 0 < a < b")
    if not (0.0 < alpha < math.pi / 2):
        raise ValueError("need 0 < alpha < pi/2")

    def ev(P):
        P = _as_points(P)
        x, y = P[..., 0], P[..., 1]
        return np.stack(
            [math.pi / 2 - np.arctan2(y, x), 0.5 * np.log(x * x + y * y)], axis=-1
        )

    def pt(P):
        P = _as_points(P)
        x, y = P[..., 0], P[..., 1]
        r2 = x * x + y * y
        fx = np.stack([y / r2, x / r2], axis=-1)
        fy = np.stack([-x / r2, y / r2], axis=-1)
        return fx, fy

    def inv(Q):
        Q = _as_points(Q)
        th = math.pi / 2 - Q[..., 0]
        r = np.exp(Q[..., 1])
        return np.stack([r * np.cos(th), r * np.sin(th)], axis=-1)

    return PlanarC1Map(
        domain=AnnularSectorDomain(a, b, alpha),
        evaluate=ev,
        partials_fn=pt,
        name="crescent-isometry",
        inverse=inv,
    )


def restretch_horizontal(D: GraphBoundedRegion, b: float) -> PlanarC1Map:
    """Height-preserving map of a graph-bounded region onto the b x a
    rectangle: (x, y) -> (b (x - g1(y)) / (g2(y) - g1(y)), y).

    Pointwise dilatation is 1 + O(eps) at heights where the graph slopes and
    the relative width defect are below eps.
    """
    ys_chk = np.linspace(0.0, D.a, 513)
    gap = np.asarray(D.g2(ys_chk), float) - np.asarray(D.g1(ys_chk), float)
    if np.any(gap <= 1e-14):
        raise ValueError("g2 - g1 vanishes somewhere on [0, a]")

    def ev(P):
        P = _as_points(P)
        x, y = P[..., 0], P[..., 1]
        lo = np.asarray(D.g1(y), float)
        hi = np.asarray(D.g2(y), float)
        return np.stack([b * (x - lo) / (hi - lo), y], axis=-1)

    def pt(P):
        P = _as_points(P)
        x, y = P[..., 0], P[..., 1]
        lo = np.asarray(D.g1(y), float)
        hi = np.asarray(D.g2(y), float)
        d1 = D.d_g1(y)
        d2 = D.d_g2(y)
        A = b / (hi - lo)
        du_dy = -A * d1 - A * A * (d2 - d1) * (x - lo) / b
        fx = np.stack([A, np.zeros_like(A)], axis=-1)
        fy = np.stack([du_dy, np.ones_like(A)], axis=-1)
        return fx, fy

    def inv(Q):
        Q = _as_points(Q)
        u, y = Q[..., 0], Q[..., 1]
        lo = np.asarray(D.g1(y), float)
        hi = np.asarray(D.g2(y), float)
        return np.stack([lo + u * (hi - lo) / b, y], axis=-1)

    return PlanarC1Map(
        domain=D, evaluate=ev, partials_fn=pt, name="restretch-h", inverse=inv
    )


def restretch_vertical(
    S: VerticalGraphRegion, l: float, eps: Optional[float] = None
) -> PlanarC1Map:
    """Width-preserving map of a vertical-graph-bounded region onto the
    w x l rectangle: (x, y) -> (x, l (y - g1(x)) / (g2(x) - g1(x))).

    With ``eps`` given, the slope and width conditions are validated on a
    sample grid and a violation is reported with the offending x.
    """
    xs_chk = np.linspace(0.0, S.w, 513)
    lo = np.asarray(S.g1(xs_chk), float)
    hi = np.asarray(S.g2(xs_chk), float)
    if np.any(hi - lo <= 1e-14):
        raise ValueError("g2 - g1 vanishes somewhere on [0, w]")
    if eps is not None:
        d1 = np.abs(S.d_g1(xs_chk))
        d2 = np.abs(S.d_g2(xs_chk))
        ratio = np.abs(l / (hi - lo) - 1.0)
        for vals, label in ((d1, "|g1'|"), (d2, "|g2'|"), (ratio, "|l/(g2-g1)-1|")):
            if np.any(vals >= eps):
                i = int(np.argmax(vals))
                raise ValueError(
                    f"{label} = {vals[i]:.6g} >= eps = {eps} at x = {xs_chk[i]:.6g}"
                )

    def ev(P):
        P = _as_points(P)
        x, y = P[..., 0], P[..., 1]
        lo = np.asarray(S.g1(x), float)
        hi = np.asarray(S.g2(x), float)
        return np.stack([x, l * (y - lo) / (hi - lo)], axis=-1)

    def pt(P):
        P = _as_points(P)
        x, y = P[..., 0], P[..., 1]
        lo = np.asarray(S.g1(x), float)
        hi = np.asarray(S.g2(x), float)
        d1 = S.d_g1(x)
        d2 = S.d_g2(x)
        A = l / (hi - lo)
        dv_dx = -A * d1 - A * A * (d2 - d1) * (y - lo) / l
        fx = np.stack([np.ones_like(A), dv_dx], axis=-1)
        fy = np.stack([np.zeros_like(A), A], axis=-1)
        return fx, fy

    def inv(Q):
        Q = _as_points(Q)
        x, v = Q[..., 0], Q[..., 1]
        lo = np.asarray(S.g1(x), float)
        hi = np.asarray(S.g2(x), float)
        return np.stack([x, lo + v * (hi - lo) / l], axis=-1)

    return PlanarC1Map(
        domain=S, evaluate=ev, partials_fn=pt, name="restretch-v", inverse=inv
    )


# --- sector straightening -------------------------------------------------


def _leaf_height_at(sector: TruncatedSector, x: float, y: float) -> float:
    """Height h of the interpolation-zone leaf through (x, y), x in [-1/2, 0]."""
    lo, hi = 0.0, sector.D
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if sector.leaf_y(x, mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _leaf_arclength(sector: TruncatedSector, h: float, x_from: float, x_to: float) -> float:
    """Hyperbolic arclength along the height-h leaf between two abscissae."""
    w = sector.foliation_shape(h)
    eh = math.exp(h)
    mid = 0.5 * (x_from + x_to)
    half = 0.5 * (x_to - x_from)
    xs = mid + half * _GL_NODES
    root = np.sqrt(np.maximum(1.0 - w * xs * xs, 1e-300))
    Y = eh * root
    dYdx = -eh * w * xs / root
    integrand = np.sqrt(1.0 + dYdx * dYdx) / Y
    return float(half * np.dot(_GL_WEIGHTS, integrand))


def straighten_sector(S: TruncatedSector):
    """Straighten the foliation of a truncated sector: each leaf goes to a
    horizontal segment with its cut-boundary endpoint at (0, height).

    Returns (map, g) where g(h) is the abscissa of the image of the geodesic
    side, equal to the leaf-length function.  In the horocyclic zone
    |height| >= D the map is the explicit (x, y) -> ((x + 1/2)/y, ln y) and
    is exactly length-preserving on leaves; in the interpolation zone leaves
    are traversed at constant speed scaled to the prescribed length.
    """
    D = S.D

    def eval_upper(x: float, y: float):
        if y >= math.exp(D):
            return (x + 0.5) / y, math.log(y)
        h = _leaf_height_at(S, x, y)
        total = _leaf_arclength(S, h, -0.5, 0.0)
        part = _leaf_arclength(S, h, -0.5, x)
        return S.leaf_length_fn(h) * part / total, h

    def ev(P):
        P = _as_points(P)
        flat = P.reshape(-1, 2)
        out = np.empty_like(flat)
        for i, (x, y) in enumerate(flat):
            z = complex(x, y)
            if abs(z) >= 1.0:
                u, h = eval_upper(x, y)
                out[i] = (u, h)
            else:
                wpt = z / (abs(z) ** 2)
                u, h = eval_upper(wpt.real, wpt.imag)
                out[i] = (u, -h)
        return out.reshape(P.shape)

    def pt(P):
        # analytic in the horocyclic zone, finite differences elsewhere
        P = _as_points(P)
        flat = P.reshape(-1, 2)
        fx = np.empty_like(flat)
        fy = np.empty_like(flat)
        step = DEFAULT_FD_STEP
        for i, (x, y) in enumerate(flat):
            if y >= math.exp(D) and abs(complex(x, y)) >= 1.0:
                fx[i] = (1.0 / y, 0.0)
                fy[i] = (-(x + 0.5) / (y * y), 1.0 / y)
            else:
                e0 = ev(np.array([[x + step, y]]))[0] - ev(np.array([[x - step, y]]))[0]
                e1 = ev(np.array([[x, y + step]]))[0] - ev(np.array([[x, y - step]]))[0]
                fx[i] = e0 / (2 * step)
                fy[i] = e1 / (2 * step)
        return fx.reshape(P.shape), fy.reshape(P.shape)

    m = PlanarC1Map(
        domain=SectorDomain(S, h_min=S.D * 1.0001, h_max=S.H),
        evaluate=ev,
        partials_fn=pt,
        name="sector-straighten",
    )
    return m, S.leaf_length_fn
