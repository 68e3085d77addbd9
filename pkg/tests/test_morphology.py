import numpy as np
import pytest

from tiltrec import morphology as mo
from tiltrec.dtcwt import direction

SOLID3 = np.ones((3, 3), bool)


def random_grid(rng, n=16, p=0.4):
    return rng.random((n, n)) < p


def test_erode_solid_block_to_center():
    d = np.zeros((7, 7), bool)
    d[2:5, 2:5] = True
    out = mo.erode(d, SOLID3)
    assert out.sum() == 1 and out[3, 3]


def test_erode_identity_element():
    rng = np.random.default_rng(0)
    d = random_grid(rng)
    ident = np.zeros((1, 1), bool)
    ident[0, 0] = True
    assert np.array_equal(mo.erode(d, ident), d)
    assert np.array_equal(mo.dilate(d, ident), d)


def test_erode_empty_element_rejected():
    with pytest.raises(ValueError):
        mo.erode(np.ones((4, 4), bool), np.zeros((3, 3), bool))


def test_dilate_single_pixel():
    d = np.zeros((7, 7), bool)
    d[3, 3] = True
    out = mo.dilate(d, SOLID3)
    assert out.sum() == 9 and out[2:5, 2:5].all()


def test_dilate_asymmetric_offset():
    # minkowski convention: offsets are element positions relative to anchor
    d = np.zeros((7, 7), bool)
    d[3, 3] = True
    se = np.zeros((3, 3), bool)
    se[1, 1] = se[1, 2] = True
    out = mo.dilate(d, se)
    assert out[3, 3] and out[3, 4] and out.sum() == 2


def test_duality_on_random_grids():
    rng = np.random.default_rng(1)
    for _ in range(50):
        d = random_grid(rng)
        s = random_grid(rng, 3, 0.5)
        s[1, 1] = True
        flipped, anchor = mo.reflect(s)
        # complement-dilate-complement with ones padding equals erosion
        pad = 2
        comp = np.pad(~d, pad, constant_values=True)
        dual = ~mo.dilate(comp, flipped, anchor)[pad:-pad, pad:-pad]
        assert np.array_equal(mo.erode(d, s), dual)


def test_dilate_commutes_with_translation():
    rng = np.random.default_rng(2)
    d = np.zeros((24, 24), bool)
    d[8:14, 9:13] = random_grid(rng, 6, 0.5)[:, :4]
    s = random_grid(rng, 3, 0.6)
    s[1, 1] = True
    moved = np.roll(d, (2, -1), axis=(0, 1))
    assert np.array_equal(np.roll(mo.dilate(d, s), (2, -1), axis=(0, 1)), mo.dilate(moved, s))


def test_opening_removes_isolated_pixel():
    line = mo.make_line(direction("HL"), 9)
    d = np.zeros((21, 21), bool)
    d[10, 10] = True
    assert not mo.opening(d, line).any()


def test_opening_idempotent_and_antiextensive():
    rng = np.random.default_rng(3)
    for _ in range(50):
        d = random_grid(rng)
        s = random_grid(rng, 3, 0.5)
        s[1, 1] = True
        opened = mo.opening(d, s)
        assert np.array_equal(mo.opening(opened, s), opened)
        assert not (opened & ~d).any()


def test_erode_dilate_sandwich():
    rng = np.random.default_rng(4)
    for _ in range(20):
        d = random_grid(rng)
        closed = mo.erode(mo.dilate(d, SOLID3), SOLID3)
        opened = mo.dilate(mo.erode(d, SOLID3), SOLID3)
        assert not (opened & ~d).any()
        assert not (d & ~closed).any()


def test_skeletonize_block_center():
    d = np.zeros((9, 9), bool)
    d[3:6, 3:6] = True
    out = mo.skeletonize(d, SOLID3)
    assert out.sum() == 1 and out[4, 4]


def test_skeletonize_empty():
    assert not mo.skeletonize(np.zeros((5, 5), bool), SOLID3).any()


def test_skeletonize_thin_line_is_itself():
    d = np.zeros((9, 9), bool)
    d[4, 2:7] = True
    assert np.array_equal(mo.skeletonize(d, SOLID3), d)


def test_skeletonize_subset_of_input():
    rng = np.random.default_rng(5)
    for _ in range(20):
        d = random_grid(rng)
        assert not (mo.skeletonize(d, SOLID3) & ~d).any()


def test_skeletonize_requires_anchor_in_element():
    se = np.zeros((3, 3), bool)
    se[0, 0] = True
    with pytest.raises(ValueError):
        mo.skeletonize(np.ones((5, 5), bool), se)


def test_stack_skeleton_empty():
    assert not mo.skeletonize_stack(np.zeros((5, 5, 2), bool)).any()


def test_stack_skeleton_single_layer_matches_2d():
    rng = np.random.default_rng(6)
    layer = random_grid(rng, 12, 0.5)
    stack = layer[:, :, None]
    assert np.array_equal(mo.skeletonize_stack(stack)[:, :, 0], mo.skeletonize(layer, SOLID3))


def test_stack_skeleton_slab_in_two_deep():
    stack = np.zeros((9, 9, 2), bool)
    stack[3:6, 3:6, 0] = True
    out = mo.skeletonize_stack(stack)
    assert out.sum() == 1 and out[4, 4, 0]


def test_make_line_pixel_count_and_anchor():
    for label in ("LH", "HH", "HL", "HLbar", "HHbar", "LHbar"):
        line = mo.make_line(direction(label), 9)
        assert line.sum() == 9
        assert line[line.shape[0] // 2, line.shape[1] // 2]


def test_make_line_rejects_bad_lengths():
    with pytest.raises(ValueError):
        mo.make_line(direction("HL"), 8)
    with pytest.raises(ValueError):
        mo.make_line(direction("HL"), 1)


def test_make_line_mirror_pair():
    a = mo.make_line(direction("HL"), 9)
    b = mo.make_line(direction("HLbar"), 9)
    assert a.shape == b.shape
    assert np.array_equal(a, b[:, ::-1]) or np.array_equal(a, b[::-1, :])
