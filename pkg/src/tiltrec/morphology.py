"""Binary morphology on 2-D grids and 3-D voxel stacks.

Grids are boolean numpy arrays indexed ``[row, col]`` (stacks add a trailing
layer axis). Structuring elements are small boolean arrays together with an
anchor cell; every helper here produces elements whose anchor sits at
``shape // 2``, and the public operations accept an explicit ``anchor`` for
foreign elements. Out-of-frame pixels count as background: erosion treats
them as 0 and dilation results are clipped to the frame.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage


def _check_se(s: np.ndarray, anchor=None, require_anchor=False):
    s = np.asarray(s, bool)
    if not s.any():
        raise ValueError("structuring element is empty")
    if anchor is None:
        anchor = tuple(n // 2 for n in s.shape)
    if require_anchor and not s[tuple(anchor)]:
        raise ValueError("structuring element must contain its anchor")
    return s, tuple(anchor)


def _centered(s: np.ndarray, anchor) -> np.ndarray:
    """Pad so the anchor lands on the center cell of an odd-sized array."""
    pads = []
    for n, a in zip(s.shape, anchor):
        before = max(n - 1 - a, a) - a
        after = max(n - 1 - a, a) - (n - 1 - a)
        pads.append((before, after))
    return np.pad(s, pads)


def erode(d: np.ndarray, s: np.ndarray, anchor=None) -> np.ndarray:
    """Set-theoretic erosion; pixels beyond the frame are background."""
    s, anchor = _check_se(s, anchor)
    d = np.asarray(d, bool)
    return ndimage.binary_erosion(d, structure=_centered(s, anchor), border_value=0)


def dilate(d: np.ndarray, s: np.ndarray, anchor=None) -> np.ndarray:
    """Minkowski dilation, clipped to the frame of ``d``."""
    s, anchor = _check_se(s, anchor)
    d = np.asarray(d, bool)
    return ndimage.binary_dilation(d, structure=_centered(s, anchor))


def opening(d: np.ndarray, s: np.ndarray, anchor=None) -> np.ndarray:
    """Erosion followed by dilation with the same element."""
    return dilate(erode(d, s, anchor), s, anchor)


def reflect(s: np.ndarray, anchor=None):
    """Point-reflect an element about its anchor. Returns (element, anchor)."""
    s, anchor = _check_se(s, anchor)
    flipped = s[tuple(slice(None, None, -1) for _ in s.shape)]
    new_anchor = tuple(n - 1 - a for n, a in zip(s.shape, anchor))
    return flipped, new_anchor


def skeletonize(d: np.ndarray, s: np.ndarray, anchor=None) -> np.ndarray:
    """Morphological skeleton: union over n of (D ⊖ nS) minus its opening.

    ``nS`` is the n-fold dilation of the element with itself (n = 0 gives the
    single-cell identity element), so ``D ⊖ nS`` is computed by iterated
    erosion. The loop stops at the largest n with a nonempty erosion.
    """
    s, anchor = _check_se(s, anchor, require_anchor=True)
    d = np.asarray(d, bool)
    se = _centered(s, anchor)
    skel = np.zeros_like(d)
    cur = d.copy()
    while cur.any():
        opened = ndimage.binary_dilation(
            ndimage.binary_erosion(cur, structure=se, border_value=0),
            structure=se,
        )
        skel |= cur & ~opened
        cur = ndimage.binary_erosion(cur, structure=se, border_value=0)
    return skel


_SOLID3_LAYER = np.ones((3, 3, 1), bool)


def skeletonize_stack(m: np.ndarray) -> np.ndarray:
    """Skeleton of a voxel stack; the solid element restricts to each layer.

    A full-depth 3x3x3 element would make the first erosion of any stack
    that is at most two layers deep empty, so the residue formula would
    return the stack unchanged and leave no loose ends to detect. With the
    element restricted to the occupied layer every layer thins by the 2-D
    formula; cross-layer structure still counts downstream because endpoint
    tests look at full 26-neighborhoods.
    """
    m = np.asarray(m, bool)
    if m.ndim != 3 or m.shape[2] < 1:
        raise ValueError("expected a (rows, cols, depth>=1) stack")
    skel = np.zeros_like(m)
    cur = m.copy()
    while cur.any():
        eroded = ndimage.binary_erosion(cur, structure=_SOLID3_LAYER, border_value=0)
        opened = ndimage.binary_dilation(eroded, structure=_SOLID3_LAYER)
        skel |= cur & ~opened
        cur = eroded
    return skel


def make_line(direction, length: int) -> np.ndarray:
    """Digital line element tangent to the edges a subband captures.

    The line runs perpendicular to the midpoint of ``direction``'s
    singularity-direction interval, drawn with one pixel per step of the
    dominant axis and centered on its anchor (``shape // 2``).

    Angles follow the grid compass used throughout: 0 deg points up
    (decreasing rows), 90 deg right (increasing cols).
    """
    if length % 2 == 0 or length < 3:
        raise ValueError("line length must be odd and >= 3")
    mid = 0.5 * (direction.interval_deg[0] + direction.interval_deg[1])
    ang = np.deg2rad(mid + 90.0)
    drow, dcol = -np.cos(ang), np.sin(ang)
    half = (length - 1) // 2
    pts = set()
    if abs(dcol) >= abs(drow):
        slope = drow / dcol
        for k in range(-half, half + 1):
            pts.add((round(k * slope), k))
    else:
        slope = dcol / drow
        for k in range(-half, half + 1):
            pts.add((k, round(k * slope)))
    r = max(max(abs(p[0]) for p in pts), max(abs(p[1]) for p in pts))
    out = np.zeros((2 * r + 1, 2 * r + 1), bool)
    for p in pts:
        out[p[0] + r, p[1] + r] = True
    return out
