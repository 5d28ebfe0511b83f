"""Upper half-plane primitives: geodesic arcs, horocyclic leaves, thin
rectangles and truncated sectors.

All lengths are hyperbolic (metric |dz|/y) unless a function says otherwise.
Horizontal segments at euclidean height y are the horocyclic leaves used
throughout; their hyperbolic length is euclidean length divided by y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

__all__ = [
    "HalfPlanePoint",
    "GeodesicArc",
    "ThinRectangle",
    "TruncatedSector",
    "leaf_length",
    "truncation_height",
    "build_sector",
    "SECTOR_APEX_LEAF_LENGTH",
]

# Hyperbolic length of the apex leaf of a 2*pi/3 sector of an ideal
# triangle: atanh(1/2) = ln(sqrt(3)).
SECTOR_APEX_LEAF_LENGTH = 0.5 * math.log(3.0)


@dataclass(frozen=True)
class HalfPlanePoint:
    """Point x + iy in the upper half-plane, y > 0."""

    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"half-plane point needs y > 0, got y={self.y}")

    def as_complex(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class GeodesicArc:
    """Geodesic arc: a vertical line {x = c} over a y-interval, or an arc of
    a semicircle centered on the real axis.

    Vertical form: ``GeodesicArc("vertical", c, span=(y0, y1))``.
    Semicircle form: ``GeodesicArc("semicircle", c, radius=R, span=(t0, t1))``
    where the arc is ``c + R*exp(i*t)`` for polar angle t in [t0, t1],
    0 < t0 < t1 < pi.
    """

    form: str
    c: float
    radius: float = 0.0
    span: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.form not in ("vertical", "semicircle"):
            raise ValueError(f"unknown geodesic form {self.form!r}")
        lo, hi = self.span
        if not hi > lo:
            raise ValueError("degenerate parameter interval")
        if self.form == "semicircle":
            if not self.radius > 0:
                raise ValueError("semicircle needs radius > 0")
            if not (0.0 < lo and hi < math.pi):
                raise ValueError("polar angle span must sit inside (0, pi)")
        elif self.form == "vertical" and lo <= 0:
            raise ValueError("vertical arc must stay above the real axis")

    @staticmethod
    def vertical(c: float, y0: float, y1: float) -> "GeodesicArc":
        return GeodesicArc("vertical", c, span=(y0, y1))

    @staticmethod
    def semicircle(c: float, radius: float, t0: float, t1: float) -> "GeodesicArc":
        return GeodesicArc("semicircle", c, radius=radius, span=(t0, t1))

    def y_range(self) -> tuple:
        if self.form == "vertical":
            return self.span
        t0, t1 = self.span
        ys = (self.radius * math.sin(t0), self.radius * math.sin(t1))
        lo, hi = min(ys), max(ys)
        if t0 < math.pi / 2 < t1:
            hi = self.radius
        return lo, hi

    def x_at_height(self, y: float) -> float:
        """x-coordinate where the arc crosses euclidean height y.

        Raises ValueError if the horizontal line misses the arc or crosses
        it twice within the parameter span.
        """
        if self.form == "vertical":
            y0, y1 = self.span
            if not (y0 <= y <= y1):
                raise ValueError(f"height {y} outside vertical span {self.span}")
            return self.c
        if not (0.0 < y <= self.radius):
            raise ValueError(f"height {y} misses semicircle of radius {self.radius}")
        t = math.asin(min(1.0, y / self.radius))
        candidates = [t, math.pi - t]
        t0, t1 = self.span
        hits = [s for s in candidates if t0 - 1e-14 <= s <= t1 + 1e-14]
        # asin(1) collapses both candidates to pi/2
        if len(hits) == 2 and abs(hits[0] - hits[1]) < 1e-14:
            hits = hits[:1]
        if not hits:
            raise ValueError(f"height {y} misses the arc span {self.span}")
        if len(hits) > 1:
            raise ValueError(f"horizontal line at y={y} crosses the arc twice")
        return self.c + self.radius * math.cos(hits[0])

    def dx_dy_at_height(self, y: float) -> float:
        """Slope dx/dy of the arc at height y (0 for vertical lines)."""
        if self.form == "vertical":
            return 0.0
        x = self.x_at_height(y)
        dx = x - self.c
        if abs(y) < 1e-15:
            raise ValueError("slope undefined on the real axis")
        return -y / dx if dx != 0 else math.copysign(1e30, -1.0)


def leaf_length(left: GeodesicArc, right: GeodesicArc, y: float) -> float:
    """Hyperbolic length of the horocyclic segment at height y between two
    geodesic arcs: |x_right(y) - x_left(y)| / y."""
    if y <= 0:
        raise ValueError("leaf height must be positive")
    xl = left.x_at_height(y)
    xr = right.x_at_height(y)
    return abs(xr - xl) / y


def truncation_height(L: float) -> float:
    """Guaranteed truncation height ln(1/L) of an ideal triangle whose
    horocyclic edges have length of order L, for 0 < L < 1."""
    if not (0.0 < L < 1.0):
        raise ValueError(f"need 0 < L < 1, got {L}")
    return math.log(1.0 / L)


@dataclass(frozen=True)
class ThinRectangle:
    """Region between two geodesic sides and two horocyclic leaves.

    Sides are vertical geodesics over [y_low, y_high] with y_low >= 1 (the
    constructor rescales to enforce this; vertical scaling is an isometry).
    ``hyperbolic_width`` is the supremum of leaf lengths, attained at the
    bottom leaf for vertical sides.
    """

    left: GeodesicArc
    right: GeodesicArc
    y_low: float
    y_high: float
    hyperbolic_width: float = field(init=False)
    height: float = field(init=False)

    def __post_init__(self):
        if not self.y_high > self.y_low:
            raise ValueError("need y_high > y_low")
        if self.y_low < 1.0 - 1e-12:
            raise ValueError("rectangle must be normalized above y = 1")
        if self.left.form != "vertical" or self.right.form != "vertical":
            raise ValueError("thin-rectangle sides must be vertical geodesics")
        if self.right.c <= self.left.c:
            raise ValueError("right side must lie to the right of the left side")
        object.__setattr__(
            self, "hyperbolic_width", leaf_length(self.left, self.right, self.y_low)
        )
        object.__setattr__(self, "height", math.log(self.y_high / self.y_low))

    @staticmethod
    def build(x_left: float, x_right: float, y_low: float, y_high: float) -> "ThinRectangle":
        """Vertical-sided rectangle, rescaled so the bottom leaf is at y >= 1."""
        if y_low <= 0:
            raise ValueError("y_low must be positive")
        s = 1.0 / y_low
        yl, yh = 1.0, y_high * s
        left = GeodesicArc.vertical(x_left * s, yl, yh)
        right = GeodesicArc.vertical(x_right * s, yl, yh)
        return ThinRectangle(left, right, yl, yh)

    def leaf_length_at(self, y: float) -> float:
        return leaf_length(self.left, self.right, y)


def _smoothstep5(u):
    """Quintic smoothstep on [0,1]: C^2, endpoint derivatives zero."""
    if u <= 0.0:
        return 0.0
    if u >= 1.0:
        return 1.0
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u))


def _hermite(p0: float, p1: float, m0: float, m1: float, width: float) -> Callable[[float], float]:
    """Cubic Hermite on [0, width] with clamped endpoint values/derivatives."""

    def fn(s: float) -> float:
        u = s / width
        h00 = (1 + 2 * u) * (1 - u) ** 2
        h10 = u * (1 - u) ** 2
        h01 = u * u * (3 - 2 * u)
        h11 = u * u * (u - 1)
        return h00 * p0 + h10 * width * m0 + h01 * p1 + h11 * width * m1

    return fn


@dataclass(frozen=True)
class TruncatedSector:
    """Truncated 2*pi/3 sector of an ideal triangle, foliated by horocyclic
    leaves away from the apex and an interpolating family near it.

    Realized in the half-plane with the geodesic side gamma on the imaginary
    axis and the sector to its left: the apex sits on the unit circle at
    (-1 + i*sqrt(3))/2, the apex leaf is the arc of |z| = 1 from i to the
    apex, and the cut boundary is the geodesic from the apex to the ideal
    points (the line x = -1/2 above the apex, the circle |z+1| = 1 below).
    A leaf's height is ln(y) of its crossing with gamma; leaves with
    |height| >= D are genuine horocyclic arcs, D = ln(1/eps).  The lower
    half (negative heights) is the image of the upper half under the
    isometric reflection z -> 1/conj(z), which fixes the apex leaf.
    """

    eps: float
    H: float
    D: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "D", math.log(1.0 / self.eps))

    @property
    def vertex(self) -> complex:
        return complex(-0.5, math.sqrt(3.0) / 2.0)

    def horocyclic_leaf_length(self, h: float) -> float:
        """Length of the pure horocyclic leaf at |height| h (valid h >= D)."""
        return 0.5 * math.exp(-abs(h))

    def leaf_length_fn(self, h: float) -> float:
        """Leaf length as a function of height; even in h, decreasing in |h|.

        Horocyclic value e^{-|h|}/2 for |h| >= D; monotone cubic Hermite
        blend from the apex leaf (length ln sqrt(3)) down to the horocyclic
        value on |h| < D, with clamped endpoint derivatives.
        """
        a = abs(h)
        if a >= self.D:
            return self.horocyclic_leaf_length(a)
        blend = _hermite(
            SECTOR_APEX_LEAF_LENGTH,
            self.horocyclic_leaf_length(self.D),
            0.0,
            -self.horocyclic_leaf_length(self.D),
            self.D,
        )
        return blend(a)

    def foliation_shape(self, h: float) -> float:
        """Curvature weight w(h) of the leaf family y = e^h sqrt(1 - w x^2):
        1 at the apex leaf (unit circle), 0 from height D up (horizontals)."""
        a = abs(h)
        if a >= self.D:
            return 0.0
        return 1.0 - _smoothstep5(a / self.D)

    def leaf_y(self, x: float, h: float) -> float:
        """Euclidean y of the (upper-part) leaf at height h over abscissa x."""
        w = self.foliation_shape(h)
        return math.exp(h) * math.sqrt(max(1.0 - w * x * x, 1e-15))

    def contains(self, z: complex) -> bool:
        x, y = z.real, z.imag
        if y <= 0 or x > 1e-12:
            return False
        if abs(z) >= 1.0:  # upper part, above the apex leaf
            return x >= -0.5 - 1e-12 and y <= math.exp(self.H) + 1e-12
        # lower part: reflection image of the upper part
        w = z / (abs(z) ** 2)
        return (
            -0.5 - 1e-12 <= w.real <= 1e-12
            and abs(w) >= 1.0 - 1e-12
            and w.imag <= math.exp(self.H) + 1e-12
        )


def build_sector(eps: float, H: float) -> TruncatedSector:
    """Truncated sector with interpolation height D = ln(1/eps), truncated at
    leaf height H > D.  A documented smallness threshold of 0.1 on eps keeps
    the blend monotone with room to spare; larger eps is refused.
    """
    if not (0.0 < eps <= 0.1):
        raise ValueError(f"eps must be in (0, 0.1], got {eps}")
    D = math.log(1.0 / eps)
    if not H > D:
        raise ValueError(f"truncation height H={H} must exceed D=ln(1/eps)={D:.6f}")
    return TruncatedSector(eps=eps, H=H)
