import json

import numpy as np
import pytest

from tiltrec import cubical as cu


def flood_fill_components(stack):
    """Independent oracle: DFS flood fill under 26-adjacency."""
    stack = np.asarray(stack, bool)
    seen = np.zeros_like(stack)
    comps = []
    dims = stack.shape
    for start in map(tuple, np.argwhere(stack)):
        if seen[start]:
            continue
        comp = np.zeros_like(stack)
        todo = [start]
        seen[start] = True
        while todo:
            x, y, z = todo.pop()
            comp[x, y, z] = True
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    for dz in (-1, 0, 1):
                        q = (x + dx, y + dy, z + dz)
                        if (
                            (dx or dy or dz)
                            and 0 <= q[0] < dims[0]
                            and 0 <= q[1] < dims[1]
                            and 0 <= q[2] < dims[2]
                            and stack[q]
                            and not seen[q]
                        ):
                            seen[q] = True
                            todo.append(q)
        comps.append(comp)
    return comps


def test_empty_stack():
    assert cu.components(np.zeros((4, 4, 3), bool)) == []


def test_single_voxel():
    m = np.zeros((4, 4, 3), bool)
    m[1, 2, 0] = True
    comps = cu.components(m)
    assert len(comps) == 1 and comps[0].voxel_count == 1


def test_corner_adjacency_joins():
    m = np.zeros((4, 4, 4), bool)
    m[0, 0, 0] = True
    m[1, 1, 1] = True
    assert len(cu.components(m)) == 1


def test_matches_flood_fill_oracle():
    rng = np.random.default_rng(0)
    for _ in range(30):
        m = rng.random((10, 10, 5)) < rng.uniform(0.2, 0.5)
        got = cu.components(m)
        want = flood_fill_components(m)
        assert len(got) == len(want)
        got_sets = {frozenset(map(tuple, np.argwhere(c.stack))) for c in got}
        want_sets = {frozenset(map(tuple, np.argwhere(c))) for c in want}
        assert got_sets == want_sets


def test_partition_invariants():
    rng = np.random.default_rng(1)
    m = rng.random((12, 12, 6)) < 0.3
    comps = cu.components(m)
    total = np.zeros_like(m, int)
    for c in comps:
        total += c.stack
    assert np.array_equal(total.astype(bool), m)
    assert total.max() <= 1  # pairwise disjoint


def test_deterministic_ordering():
    m = np.zeros((6, 6, 4), bool)
    m[5, 5, 0] = True
    m[0, 0, 3] = True
    m[2, 2, 1] = True
    keys = []
    for c in cu.components(m):
        vox = np.argwhere(c.stack)
        keys.append(min((z, y, x) for x, y, z in vox))
    assert keys == sorted(keys)


def test_bridging_full_stack():
    comp = cu.bridging_component(np.ones((4, 4, 13), bool))
    assert comp is not None and comp.voxel_count == 4 * 4 * 13


def test_bridging_absent_when_top_empty():
    m = np.zeros((4, 4, 13), bool)
    m[:, :, :6] = True
    assert cu.bridging_component(m) is None


def test_bridging_column():
    m = np.zeros((5, 5, 13), bool)
    m[2, 3, :] = True
    comp = cu.bridging_component(m)
    assert comp is not None
    assert np.array_equal(comp.stack, m)


def test_bridging_modes_differ():
    # staircase touching bottom and top at different (x, y)
    m = np.zeros((3, 5, 4), bool)
    m[1, 0, 0] = m[1, 1, 1] = m[1, 2, 2] = m[1, 3, 3] = True
    assert cu.bridging_component(m, mode="literal") is None
    assert cu.bridging_component(m, mode="relaxed") is not None


def test_filtration_birth_constant():
    m = np.zeros((4, 4, 3), bool)
    m[1, 1, :] = True
    idx, comp = cu.filtration_birth([m, m, m])
    assert idx == 0 and comp.voxel_count == 3


def test_filtration_birth_at_three():
    base = np.zeros((4, 4, 3), bool)
    base[1, 1, 0] = True
    stacks = []
    grown = base.copy()
    for i in range(5):
        if i == 3:
            grown = grown.copy()
            grown[1, 1, :] = True
        stacks.append(grown)
    idx, comp = cu.filtration_birth(stacks)
    assert idx == 3


def test_filtration_rejects_non_nested():
    a = np.zeros((3, 3, 2), bool)
    a[2, 1, 0] = True
    b = np.zeros_like(a)
    with pytest.raises(ValueError, match=r"x=2, y=1, z=0"):
        cu.filtration_birth([a, b])


def test_filtration_none():
    m = np.zeros((3, 3, 3), bool)
    m[0, 0, 0] = True
    assert cu.filtration_birth([m, m]) is None


def test_bridging_monotone_under_growth():
    rng = np.random.default_rng(2)
    for _ in range(20):
        a = rng.random((6, 6, 5)) < 0.25
        b = a | (rng.random((6, 6, 5)) < 0.2)
        if cu.bridging_component(a) is not None:
            assert cu.bridging_component(b) is not None


def test_rle_roundtrip():
    rng = np.random.default_rng(3)
    g = rng.random((9, 13)) < 0.4
    assert np.array_equal(cu.rle_decode(cu.rle_encode(g), g.shape), g)


def test_component_json():
    m = np.zeros((3, 3, 2), bool)
    m[1, 1, :] = True
    comp = cu.components(m)[0]
    payload = json.loads(cu.component_to_json(comp))
    assert payload["voxel_count"] == 2
    assert payload["shape"] == [3, 3, 2]
