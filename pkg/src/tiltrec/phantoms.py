"""Binary test phantoms on a square pixel grid.

Shapes are described in the normalized frame [0, 1]^2 and rasterized by a
pixel-center inclusion test, so one spec scales to any grid size. Pixel
(i, j) of an n x n image covers the physical point
((j + 0.5)/n, (i + 0.5)/n): columns map to the horizontal axis, rows to the
vertical one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from matplotlib.path import Path

MARGIN = 0.05  # all shapes stay strictly inside [MARGIN, 1 - MARGIN]^2


@dataclass(frozen=True)
class Image:
    """Square density image; ``data[i, j]`` at physical ((j+.5), (i+.5))*h."""

    data: np.ndarray
    pixel_size: float

    def __post_init__(self):
        d = np.asarray(self.data, float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("phantom images must be square")
        if not np.isfinite(d).all():
            raise ValueError("image contains non-finite values")
        object.__setattr__(self, "data", d)

    @property
    def size(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class PhantomSpec:
    kind: str
    size: int
    center: tuple = (0.5, 0.5)
    r_out: float = 0.3
    r_in: float = 0.15
    ellipses: tuple = ()  # (cx, cy, semi_x, semi_y, angle_deg) each
    curve_points: tuple = ()  # closed polyline for kind="custom-curve"

    KINDS = ("annulus", "ellipse-group", "blob", "high-curvature", "custom-curve")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown phantom kind {self.kind!r}")
        if self.size < 32 or self.size & (self.size - 1):
            raise ValueError("size must be a power of two >= 32")


def _pixel_centers(n: int):
    h = 1.0 / n
    px = (np.arange(n) + 0.5) * h  # horizontal, indexed by column
    py = (np.arange(n) + 0.5) * h  # vertical, indexed by row
    return np.meshgrid(px, py, indexing="xy")  # [row, col]


def _check_margin(points, what: str):
    pts = np.asarray(points, float)
    lo, hi = pts.min(), pts.max()
    if lo <= MARGIN or hi >= 1.0 - MARGIN:
        raise ValueError(f"{what} leaves the interior margin [{MARGIN}, {1 - MARGIN}]")


def _fill_polyline(points, n: int) -> np.ndarray:
    px, py = _pixel_centers(n)
    path = Path(np.asarray(points, float), closed=True)
    inside = path.contains_points(np.column_stack([px.ravel(), py.ravel()]))
    return inside.reshape(n, n)


def _polar_curve(radius_fn, center, samples=2048):
    phi = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    r = radius_fn(phi)
    return np.column_stack([center[0] + r * np.sin(phi), center[1] + r * np.cos(phi)])


def _blob_curve():
    # Smooth, non-convex, bounded curvature; stand-in for the paper-style blob.
    def radius(phi):
        return 0.24 + 0.045 * np.cos(2 * phi + 0.7) + 0.035 * np.sin(3 * phi)

    return _polar_curve(radius, (0.5, 0.5))


def _high_curvature_curve():
    # A narrow angular bump drives the curvature radius below 5 px at 256^2.
    def radius(phi):
        d = np.angle(np.exp(1j * (phi - 2.2)))
        return 0.23 + 0.04 * np.cos(2 * phi) + 0.1 * np.exp(-0.5 * (d / 0.1) ** 2)

    return _polar_curve(radius, (0.5, 0.5), samples=4096)


def _rasterize_ellipse(e, n: int) -> np.ndarray:
    cx, cy, a, b, ang = e
    px, py = _pixel_centers(n)
    dx, dy = px - cx, py - cy
    phi = math.radians(ang)
    u = (dx * math.cos(phi) + dy * math.sin(phi)) / a
    v = (-dx * math.sin(phi) + dy * math.cos(phi)) / b
    return u * u + v * v <= 1.0


def make_phantom(spec: PhantomSpec) -> Image:
    """Rasterize a phantom spec to a {0,1} image."""
    n = spec.size
    if spec.kind == "annulus":
        if not (0 < spec.r_in < spec.r_out):
            raise ValueError("annulus needs 0 < r_in < r_out")
        _check_margin(
            [
                (spec.center[0] - spec.r_out, spec.center[1] - spec.r_out),
                (spec.center[0] + spec.r_out, spec.center[1] + spec.r_out),
            ],
            "annulus",
        )
        px, py = _pixel_centers(n)
        d = np.hypot(px - spec.center[0], py - spec.center[1])
        grid = (d <= spec.r_out) & (d >= spec.r_in)
    elif spec.kind == "ellipse-group":
        grid = np.zeros((n, n), bool)
        rasters = []
        for e in spec.ellipses:
            cx, cy, a, b, _ = e
            r = max(a, b)
            _check_margin([(cx - r, cy - r), (cx + r, cy + r)], "ellipse")
            rasters.append(_rasterize_ellipse(e, n))
        for i in range(len(rasters)):
            for j in range(i + 1, len(rasters)):
                if (rasters[i] & rasters[j]).any():
                    raise ValueError(f"ellipses {i} and {j} overlap")
        for r in rasters:
            grid |= r
    elif spec.kind in ("blob", "high-curvature", "custom-curve"):
        if spec.kind == "blob":
            pts = _blob_curve()
        elif spec.kind == "high-curvature":
            pts = _high_curvature_curve()
        else:
            pts = np.asarray(spec.curve_points, float)
            if len(pts) < 3:
                raise ValueError("custom-curve needs at least 3 points")
        _check_margin(pts, spec.kind)
        grid = _fill_polyline(pts, n)
    else:  # pragma: no cover - guarded by PhantomSpec
        raise ValueError(spec.kind)
    return Image(grid.astype(float), 1.0 / n)


FIXTURES = {
    "annulus": lambda size: PhantomSpec("annulus", size, (0.5, 0.5), 0.42, 0.17),
    "ellipses": lambda size: PhantomSpec(
        "ellipse-group",
        size,
        ellipses=(
            (0.26, 0.27, 0.155, 0.125, 15.0),
            (0.74, 0.25, 0.13, 0.155, -20.0),
            (0.27, 0.74, 0.14, 0.16, 80.0),
            (0.75, 0.73, 0.16, 0.13, 40.0),
        ),
    ),
    "blob": lambda size: PhantomSpec("blob", size),
    "highcurv": lambda size: PhantomSpec("high-curvature", size),
}


def fixture(name: str, size: int) -> PhantomSpec:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; have {sorted(FIXTURES)}")
    return FIXTURES[name](size)
