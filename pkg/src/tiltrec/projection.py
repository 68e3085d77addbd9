"""Parallel-beam forward projector (exact pixel intersection lengths).

Angle convention: a view at angle theta measures line integrals along rays
with direction (-cos(theta), sin(theta)) in the physical (horizontal,
vertical) frame; the measured normal is (sin(theta), cos(theta)), so theta=0
rays run horizontally and detect horizontal edges. Rays are indexed by the
signed detector offset p from the image center. All lengths are physical
(pixel_size units per pixel), and the operator is applied matrix-free by
Siddon-style grid traversal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit


@dataclass(frozen=True)
class ScanGeometry:
    angles_deg: tuple
    detector_count: int
    detector_spacing: float
    image_size: int
    pixel_size: float

    def __post_init__(self):
        a = np.asarray(self.angles_deg, float)
        if a.ndim != 1 or len(a) == 0:
            raise ValueError("need at least one view angle")
        if len(a) > 1 and not (np.diff(a) > 0).all():
            raise ValueError("angles must be strictly increasing")
        if len(a) > 1 and a[-1] - a[0] >= 180.0:
            raise ValueError("angular span must be below 180 degrees")
        object.__setattr__(self, "angles_deg", tuple(float(v) for v in a))
        diagonal = math.sqrt(2.0) * self.image_size * self.pixel_size
        if self.detector_count * self.detector_spacing < diagonal - 1e-9:
            raise ValueError("detector row does not cover the image diagonal")

    @classmethod
    def default(cls, image_size: int, angles_deg) -> "ScanGeometry":
        px = 1.0 / image_size
        return cls(
            angles_deg=tuple(angles_deg),
            detector_count=math.ceil(math.sqrt(2.0) * image_size),
            detector_spacing=px,
            image_size=image_size,
            pixel_size=px,
        )

    @property
    def extent(self) -> float:
        return self.image_size * self.pixel_size

    def ray_offsets(self) -> np.ndarray:
        k = np.arange(self.detector_count, dtype=float)
        return (k - (self.detector_count - 1) / 2.0) * self.detector_spacing


@dataclass(frozen=True)
class Sinogram:
    data: np.ndarray
    geometry: ScanGeometry
    noise_seed: int | None = None
    relative_noise: float = 0.0

    def __post_init__(self):
        d = np.asarray(self.data, float)
        expected = (len(self.geometry.angles_deg), self.geometry.detector_count)
        if d.shape != expected:
            raise ValueError(f"sinogram shape {d.shape} != geometry {expected}")
        if not np.isfinite(d).all():
            raise ValueError("sinogram contains non-finite values")
        object.__setattr__(self, "data", d)


@njit(cache=True)
def _trace_all(image, sino, angles_rad, offsets, n, h, forward):
    """Walk every ray across the pixel grid, accumulating exact chord lengths.

    forward=True gathers image values into ``sino``; otherwise ``sino`` is
    read and scattered into ``image`` (the exact adjoint, same traversal).
    """
    extent = n * h
    cx = extent / 2.0
    t_span = extent * 1.5
    eps = 1e-12
    for ia in range(angles_rad.shape[0]):
        th = angles_rad[ia]
        nx_, ny_ = math.sin(th), math.cos(th)  # measured normal
        dx, dy = -math.cos(th), math.sin(th)  # ray direction
        for ip in range(offsets.shape[0]):
            p = offsets[ip]
            ox = cx + p * nx_ - t_span * dx
            oy = cx + p * ny_ - t_span * dy
            tmin, tmax = 0.0, 2.0 * t_span
            if abs(dx) > eps:
                ta, tb = (0.0 - ox) / dx, (extent - ox) / dx
                lo, hi = min(ta, tb), max(ta, tb)
                tmin, tmax = max(tmin, lo), min(tmax, hi)
            elif ox < 0.0 or ox > extent:
                continue
            if abs(dy) > eps:
                ta, tb = (0.0 - oy) / dy, (extent - oy) / dy
                lo, hi = min(ta, tb), max(ta, tb)
                tmin, tmax = max(tmin, lo), min(tmax, hi)
            elif oy < 0.0 or oy > extent:
                continue
            if tmin >= tmax:
                continue
            # no clamping: a ray exactly on the outer edge stays out of range
            # and the per-segment guard skips it (half-open frame convention)
            ix = int(math.floor((ox + (tmin + eps) * dx) / h))
            iy = int(math.floor((oy + (tmin + eps) * dy) / h))
            stepx = 1 if dx > 0 else -1
            stepy = 1 if dy > 0 else -1
            if abs(dx) > eps:
                nextx = ((ix + (1 if dx > 0 else 0)) * h - ox) / dx
                dtx = h / abs(dx)
            else:
                nextx = 1e30
                dtx = 1e30
            if abs(dy) > eps:
                nexty = ((iy + (1 if dy > 0 else 0)) * h - oy) / dy
                dty = h / abs(dy)
            else:
                nexty = 1e30
                dty = 1e30
            t = tmin
            acc = 0.0
            while t < tmax - eps:
                tn = nextx if nextx < nexty else nexty
                if tn > tmax:
                    tn = tmax
                seg = tn - t
                if seg > 0.0 and 0 <= ix < n and 0 <= iy < n:
                    if forward:
                        acc += seg * image[iy, ix]
                    else:
                        image[iy, ix] += seg * sino[ia, ip]
                t = tn
                if nextx <= nexty:
                    ix += stepx
                    nextx += dtx
                else:
                    iy += stepy
                    nexty += dty
            if forward:
                sino[ia, ip] = acc


def _as_array(image) -> np.ndarray:
    data = image.data if hasattr(image, "data") else image
    a = np.ascontiguousarray(data, float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("projector expects a square image")
    return a


def forward_project(image, geom: ScanGeometry) -> Sinogram:
    """Line integrals of ``image`` for every (angle, detector) pair."""
    a = _as_array(image)
    if a.shape[0] != geom.image_size:
        raise ValueError("image size does not match geometry")
    sino = np.zeros((len(geom.angles_deg), geom.detector_count))
    _trace_all(
        a,
        sino,
        np.deg2rad(np.asarray(geom.angles_deg)),
        geom.ray_offsets(),
        geom.image_size,
        geom.pixel_size,
        True,
    )
    return Sinogram(sino, geom)


def apply_adjoint(sino: Sinogram, geom: ScanGeometry | None = None) -> np.ndarray:
    """Exact transpose of forward_project (same ray traversal, scattered)."""
    geom = geom or sino.geometry
    if geom != sino.geometry:
        raise ValueError("sinogram geometry mismatch")
    out = np.zeros((geom.image_size, geom.image_size))
    _trace_all(
        out,
        np.ascontiguousarray(sino.data),
        np.deg2rad(np.asarray(geom.angles_deg)),
        geom.ray_offsets(),
        geom.image_size,
        geom.pixel_size,
        False,
    )
    return out


def add_noise(sino: Sinogram, relative_level: float, seed: int) -> Sinogram:
    """Gaussian noise scaled so ||noise|| = relative_level * ||data|| exactly."""
    if relative_level < 0:
        raise ValueError("relative_level must be >= 0")
    if relative_level == 0:
        return Sinogram(sino.data.copy(), sino.geometry, seed, 0.0)
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal(sino.data.shape)
    norm = np.linalg.norm(eps)
    target = relative_level * np.linalg.norm(sino.data)
    if norm > 0:
        eps *= target / norm
    return Sinogram(sino.data + eps, sino.geometry, seed, relative_level)


def dense_matrix(geom: ScanGeometry) -> np.ndarray:
    """Explicit matrix oracle for tiny grids: per-pixel box clipping.

    Independent of the traversal kernel; each entry is the chord length of a
    ray inside one pixel, computed by Liang-Barsky clipping.
    """
    n = geom.image_size
    if n > 16:
        raise ValueError("dense assembly is a test oracle for grids <= 16^2")
    h = geom.pixel_size
    cx = n * h / 2.0
    rows = []
    for th in np.deg2rad(np.asarray(geom.angles_deg)):
        nx_, ny_ = math.sin(th), math.cos(th)
        dx, dy = -math.cos(th), math.sin(th)
        for p in geom.ray_offsets():
            ox, oy = cx + p * nx_, cx + p * ny_
            row = np.zeros(n * n)
            for iy in range(n):
                for ix in range(n):
                    t0, t1 = -1e30, 1e30
                    ok = True
                    for o, d, lo, hi in (
                        (ox, dx, ix * h, (ix + 1) * h),
                        (oy, dy, iy * h, (iy + 1) * h),
                    ):
                        if abs(d) < 1e-12:
                            # half-open cells so a ray on a shared edge
                            # belongs to exactly one row/column of pixels
                            if o < lo or o >= hi:
                                ok = False
                                break
                        else:
                            ta, tb = (lo - o) / d, (hi - o) / d
                            t0 = max(t0, min(ta, tb))
                            t1 = min(t1, max(ta, tb))
                    if ok and t1 > t0:
                        row[iy * n + ix] = t1 - t0
            rows.append(row)
    return np.asarray(rows)
