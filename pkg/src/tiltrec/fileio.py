"""File formats: 8-bit PGM (P5), float PFM, raw sinograms with JSON sidecars."""

from __future__ import annotations

import json
import os

import numpy as np


def write_pgm(path, grid):
    """8-bit binary PGM; boolean input maps to {0, 255}."""
    a = np.asarray(grid)
    if a.dtype == bool:
        a = a.astype(np.uint8) * 255
    else:
        a = np.clip(np.round(a), 0, 255).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(f"P5\n{a.shape[1]} {a.shape[0]}\n255\n".encode())
        f.write(a.tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as f:
        data = f.read()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM file")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise ValueError(f"{path}: unsupported maxval {maxval}")
    raw = parts[4][: w * h]
    return np.frombuffer(raw, np.uint8).reshape(h, w)


def write_pfm(path, image):
    """Grayscale PFM, little-endian (negative scale), rows bottom-to-top."""
    a = np.asarray(image, np.float32)
    if a.ndim != 2:
        raise ValueError("PFM writer expects a 2-D image")
    with open(path, "wb") as f:
        f.write(f"Pf\n{a.shape[1]} {a.shape[0]}\n-1.0\n".encode())
        f.write(a[::-1].tobytes())


def read_pfm(path) -> np.ndarray:
    with open(path, "rb") as f:
        header = f.readline().strip()
        if header != b"Pf":
            raise ValueError(f"{path}: not a grayscale PFM file")
        w, h = (int(v) for v in f.readline().split())
        scale = float(f.readline())
        data = np.frombuffer(f.read(4 * w * h), "<f4" if scale < 0 else ">f4")
    return data.reshape(h, w)[::-1].astype(np.float64)


def write_sinogram(path, sino):
    """Raw little-endian float32, angle-major, plus a .json sidecar."""
    data = np.asarray(sino.data, "<f4")
    with open(path, "wb") as f:
        f.write(data.tobytes())
    g = sino.geometry
    sidecar = {
        "angles_deg": list(g.angles_deg),
        "detector_count": g.detector_count,
        "detector_spacing": g.detector_spacing,
        "image_size": g.image_size,
        "pixel_size": g.pixel_size,
        "noise_seed": sino.noise_seed,
        "relative_noise": sino.relative_noise,
    }
    with open(sidecar_path(path), "w") as f:
        json.dump(sidecar, f, indent=1, sort_keys=True)


def sidecar_path(path) -> str:
    return os.fspath(path) + ".json"


def read_sinogram(path):
    from .projection import ScanGeometry, Sinogram

    try:
        with open(sidecar_path(path)) as f:
            meta = json.load(f)
        geom = ScanGeometry(
            angles_deg=tuple(meta["angles_deg"]),
            detector_count=meta["detector_count"],
            detector_spacing=meta["detector_spacing"],
            image_size=meta["image_size"],
            pixel_size=meta["pixel_size"],
        )
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise ValueError(f"{sidecar_path(path)}: malformed sidecar ({exc})") from exc
    raw = np.fromfile(path, "<f4")
    expected = len(geom.angles_deg) * geom.detector_count
    if raw.size != expected:
        raise ValueError(
            f"{path}: expected {expected} float32 samples, found {raw.size}"
        )
    data = raw.reshape(len(geom.angles_deg), geom.detector_count).astype(np.float64)
    return Sinogram(
        data=data,
        geometry=geom,
        noise_seed=meta.get("noise_seed"),
        relative_noise=meta.get("relative_noise", 0.0),
    )
