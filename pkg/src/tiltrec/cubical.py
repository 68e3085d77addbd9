"""Connected components (H0) of 3-D binary stacks under 26-adjacency.

A stack is a boolean array indexed ``[x, y, z]`` = (row, col, layer); two set
voxels belong to one component when their closed unit cubes intersect, i.e.
when all index offsets are within 1. Components come back as disjoint stacks
(component matrices) in a deterministic order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

_ADJ26 = np.ones((3, 3, 3), bool)


@dataclass(frozen=True)
class ComponentMatrix:
    """One connected component, same shape as its parent stack."""

    stack: np.ndarray
    component_id: int
    voxel_count: int

    def layer(self, z: int) -> np.ndarray:
        return self.stack[:, :, z]

    def projection(self) -> np.ndarray:
        """Elementwise OR over layers."""
        return self.stack.any(axis=2)


def components(m: np.ndarray) -> list[ComponentMatrix]:
    """Split a stack into its 26-connected components.

    Ordering is by each component's lexicographically smallest voxel in
    (z, y, x), so the result is independent of labeling internals.
    """
    m = np.asarray(m, bool)
    if m.ndim != 3:
        raise ValueError("expected a 3-D stack")
    labels, count = ndimage.label(m, structure=_ADJ26)
    keyed = []
    for lab in range(1, count + 1):
        vox = np.argwhere(labels == lab)
        key = min((int(z), int(y), int(x)) for x, y, z in vox)
        keyed.append((key, lab, len(vox)))
    keyed.sort()
    out = []
    for cid, (key, lab, nvox) in enumerate(keyed):
        out.append(ComponentMatrix(labels == lab, cid, nvox))
    return out


def bridging_component(a: np.ndarray, mode: str = "literal") -> ComponentMatrix | None:
    """First component touching both the bottom and top layers.

    ``literal`` requires a shared (x, y) set in both layer 0 and the last
    layer; ``relaxed`` only asks for any voxel in each.
    """
    a = np.asarray(a, bool)
    if a.ndim != 3 or a.shape[2] < 2:
        raise ValueError("stack must have depth >= 2")
    if mode not in ("literal", "relaxed"):
        raise ValueError("mode must be 'literal' or 'relaxed'")
    for comp in components(a):
        bottom, top = comp.stack[:, :, 0], comp.stack[:, :, -1]
        if mode == "literal":
            hit = bool((bottom & top).any())
        else:
            hit = bool(bottom.any() and top.any())
        if hit:
            return comp
    return None


def filtration_birth(stacks, mode: str = "literal"):
    """Smallest index whose stack has a bridging component.

    The list must be a filtration (each stack contained in the next); the
    first violating voxel is reported otherwise. Returns ``(index,
    component)`` or ``None`` when no stack ever bridges.
    """
    stacks = [np.asarray(s, bool) for s in stacks]
    for i in range(len(stacks) - 1):
        bad = stacks[i] & ~stacks[i + 1]
        if bad.any():
            x, y, z = (int(v) for v in np.argwhere(bad)[0])
            raise ValueError(
                f"not a filtration: voxel (x={x}, y={y}, z={z}) is set in "
                f"stack {i} but missing from stack {i + 1}"
            )
    for i, s in enumerate(stacks):
        comp = bridging_component(s, mode=mode)
        if comp is not None:
            return i, comp
    return None


def rle_encode(grid: np.ndarray) -> list:
    """Row-major run-length encoding of set cells: [row, col_start, length]."""
    grid = np.asarray(grid, bool)
    runs = []
    for r in range(grid.shape[0]):
        row = grid[r]
        diffs = np.diff(row.astype(np.int8))
        starts = list(np.flatnonzero(diffs == 1) + 1)
        ends = list(np.flatnonzero(diffs == -1) + 1)
        if row[0]:
            starts.insert(0, 0)
        if row[-1]:
            ends.append(len(row))
        runs.extend([r, int(s), int(e - s)] for s, e in zip(starts, ends))
    return runs


def rle_decode(runs, shape) -> np.ndarray:
    grid = np.zeros(shape, bool)
    for r, c, n in runs:
        grid[r, c : c + n] = True
    return grid


def component_to_json(comp: ComponentMatrix) -> str:
    """Run-length encoded JSON for one component (per-layer RLE)."""
    layers = [rle_encode(comp.stack[:, :, z]) for z in range(comp.stack.shape[2])]
    return json.dumps(
        {
            "component_id": comp.component_id,
            "shape": list(comp.stack.shape),
            "voxel_count": comp.voxel_count,
            "layers_rle": layers,
        },
        sort_keys=True,
    )
