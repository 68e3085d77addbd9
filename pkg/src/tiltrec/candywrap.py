"""Candywrap distance and its rasterized masks.

The distance D̃ between pointed directions (position + tangent angle) is the
bending energy of the unique cubic graph interpolant between them plus the
Euclidean gap. It is finite only when the target lies off the vertical axis
of the canonical frame and its tangent stays in the open right half-circle;
it is deliberately asymmetric.

Masks rasterize sublevel sets {D̃ < s} for the fixed target tangents ±pi/6 on
the square frame [-10, 10]^2 divided into N x N cells. Cell (i, j) covers
frame point (x, y) = (-10 + (i+0.5)h, 10 - (j+0.5)h) with h = 20/N, i.e.
rows advance along +x and columns along -y; with this layout a stamp renders
on the pixel grid exactly as the pipeline applies it. The anchor is the cell
containing the origin, (N//2, N//2). One mask cell corresponds to one pixel
of the grid being dilated, so the frame unit equals N/20 pixels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MASK_KINDS = ("+R", "+L", "-R", "-L")

# (target tangent angle, sign of x) defining each basic mask's point set
_KIND_PARAMS = {
    "+R": (math.pi / 6, +1),
    "+L": (math.pi / 6, -1),
    "-R": (-math.pi / 6, +1),
    "-L": (-math.pi / 6, -1),
}


@dataclass(frozen=True)
class PointedDirection:
    """A planar position with a tangent angle in (-pi, pi]."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        if not (-math.pi < self.theta <= math.pi):
            raise ValueError("theta must lie in (-pi, pi]")


def cw_distance_canonical(x: float, y: float, theta: float) -> float:
    """D̃ from the canonical frame origin (0,0,0) to (x, y, theta).

    Closed form: the cubic g with g(0)=g'(0)=0, g(x)=y, g'(x)=tan(theta) has
    bending energy 4(3a²x³ + 3abx² + b²x) with a = (tanθ - 2y/x)/x² and
    b = (-tanθ + 3y/x)/x; the distance adds the Euclidean gap. For x < 0 the
    mirrored point (-x, -y, theta) is equivalent, which flips the sign of the
    energy polynomial. Off-branch inputs (x = 0 with (y, theta) != 0, or
    cos(theta) <= 0) give +inf.
    """
    if x == 0.0:
        return 0.0 if (y == 0.0 and theta == 0.0) else math.inf
    if math.cos(theta) <= 0.0:
        return math.inf
    t = math.tan(theta)
    a = (t - 2.0 * y / x) / (x * x)
    b = (-t + 3.0 * y / x) / x
    bend = 4.0 * (3.0 * a * a * x**3 + 3.0 * a * b * x * x + b * b * x)
    if x < 0.0:
        bend = -bend
    return bend + math.hypot(x, y)


def _canonical_grid(x: np.ndarray, y: np.ndarray, theta: float) -> np.ndarray:
    """Vectorized canonical distance for a fixed tangent angle."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    out = np.full(np.broadcast(x, y).shape, np.inf)
    if math.cos(theta) <= 0.0:
        on_origin = (x == 0.0) & (y == 0.0) & (theta == 0.0)
        out[on_origin] = 0.0
        return out
    t = math.tan(theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = (t - 2.0 * y / x) / (x * x)
        b = (-t + 3.0 * y / x) / x
        bend = 4.0 * (3.0 * a * a * x**3 + 3.0 * a * b * x * x + b * b * x)
        val = np.sign(x) * bend + np.hypot(x, y)
    ok = x != 0.0
    out[ok] = val[ok]
    if theta == 0.0:
        out[(x == 0.0) & (y == 0.0)] = 0.0
    return out


def cw_distance(p1: PointedDirection, p2: PointedDirection) -> float:
    """D̃(p1, p2): shift p1 into p2's frame, rotate, evaluate canonically."""
    x, y, th = p1.x - p2.x, p1.y - p2.y, p1.theta - p2.theta
    c, s = math.cos(p2.theta), math.sin(p2.theta)
    xr = c * x + s * y
    yr = -s * x + c * y
    return cw_distance_canonical(xr, yr, th)


@dataclass(frozen=True)
class CandywrapMask:
    """Rasterized {D̃ < s} sublevel set for one of the four basic kinds."""

    kind: str
    s: float
    n: int
    mask: np.ndarray
    anchor: tuple

    @property
    def cell_size(self) -> float:
        return 20.0 / self.n


def _cell_centers(n: int):
    h = 20.0 / n
    xs = -10.0 + (np.arange(n) + 0.5) * h
    ys = 10.0 - (np.arange(n) + 0.5) * h
    return np.meshgrid(xs, ys, indexing="ij")


def basic_mask(kind: str, s: float, n: int = 64) -> CandywrapMask:
    """Rasterize one basic candywrap mask on the N x N frame grid.

    Cell centers are tested against the strict inequality D̃ < s together
    with the kind's sign constraint on x.
    """
    if kind not in _KIND_PARAMS:
        raise ValueError(f"unknown mask kind {kind!r}; expected one of {MASK_KINDS}")
    if s <= 0:
        raise ValueError("s must be positive")
    if n < 8:
        raise ValueError("mask grid must be at least 8 cells")
    theta, xsign = _KIND_PARAMS[kind]
    gx, gy = _cell_centers(n)
    dist = _canonical_grid(gx, gy, theta)
    mask = (dist < s) & (np.sign(gx) == xsign)
    return CandywrapMask(kind, float(s), int(n), mask, (n // 2, n // 2))


def rotate_mask(mask: CandywrapMask, theta: float) -> np.ndarray:
    """Rotate a mask stamp about its anchor by ``theta`` radians.

    Every target cell center is pulled back through the inverse rotation and
    sampled from the source raster (nearest cell), so the rotated stamp has
    no holes. The anchor stays at (N//2, N//2).
    """
    n = mask.n
    h = mask.cell_size
    gx, gy = _cell_centers(n)
    c, s = math.cos(theta), math.sin(theta)
    xs = c * gx + s * gy
    ys = -s * gx + c * gy
    i = np.floor((xs + 10.0) / h).astype(int)
    j = np.floor((10.0 - ys) / h).astype(int)
    inside = (i >= 0) & (i < n) & (j >= 0) & (j < n)
    out = np.zeros((n, n), bool)
    out[inside] = mask.mask[i[inside], j[inside]]
    return out
