import math

import numpy as np
import pytest
from scipy.integrate import simpson

from tiltrec import candywrap as cw


def quadrature_distance(x, y, theta, samples=2001):
    """Independent oracle: Simpson quadrature of the cubic's bending energy."""
    if x < 0:
        x, y = -x, -y
    t = math.tan(theta)
    a = (t - 2 * y / x) / x**2
    b = (-t + 3 * y / x) / x
    s = np.linspace(0.0, x, samples)
    gpp = 6 * a * s + 2 * b
    return simpson(gpp**2, x=s) + math.hypot(x, y)


def test_canonical_straight_segment():
    assert cw.cw_distance_canonical(1.0, 0.0, 0.0) == pytest.approx(1.0)


def test_canonical_unit_cubic():
    # target (1, 1, arctan 2) interpolated by g(s) = s^2: energy 4, length sqrt 2
    val = cw.cw_distance_canonical(1.0, 1.0, math.atan(2.0))
    assert val == pytest.approx(4.0 + math.sqrt(2.0), rel=1e-12)
    assert val == pytest.approx(quadrature_distance(1.0, 1.0, math.atan(2.0)), rel=1e-10)


def test_vertical_and_reversed_cases():
    assert cw.cw_distance_canonical(0.0, 1.0, 0.0) == math.inf
    assert cw.cw_distance_canonical(0.0, 0.0, 0.0) == 0.0
    assert cw.cw_distance_canonical(0.0, 0.0, 0.3) == math.inf
    assert cw.cw_distance_canonical(1.0, 0.0, 2.0) == math.inf  # cos(theta) <= 0


def test_mirror_identity():
    rng = np.random.default_rng(0)
    for _ in range(200):
        x = rng.uniform(0.1, 5)
        y = rng.uniform(-5, 5)
        th = rng.uniform(-1.4, 1.4)
        assert cw.cw_distance_canonical(-x, -y, th) == pytest.approx(
            cw.cw_distance_canonical(x, y, th), rel=1e-12
        )


def test_closed_form_matches_quadrature():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        x = rng.uniform(0.05, 8) * rng.choice([-1, 1])
        y = rng.uniform(-8, 8)
        th = rng.uniform(-1.5, 1.5)
        got = cw.cw_distance_canonical(x, y, th)
        want = quadrature_distance(x, y, th)
        assert got == pytest.approx(want, rel=1e-8)


def test_euclidean_lower_bound():
    rng = np.random.default_rng(2)
    x = rng.uniform(-10, 10, 10_000)
    y = rng.uniform(-10, 10, 10_000)
    th = rng.uniform(-1.5, 1.5, 10_000)
    for xi, yi, ti in zip(x, y, th):
        assert cw.cw_distance_canonical(xi, yi, ti) >= math.hypot(xi, yi) - 1e-12


def test_distance_shift_invariance():
    rng = np.random.default_rng(3)
    for _ in range(100):
        p = rng.uniform(-3, 3, 2)
        q = rng.uniform(-3, 3, 2)
        v = rng.uniform(-5, 5, 2)
        t1, t2 = rng.uniform(-3, 3, 2)
        t1 = math.remainder(t1, 2 * math.pi) or 1e-3
        t2 = math.remainder(t2, 2 * math.pi) or 1e-3
        base = cw.cw_distance(cw.PointedDirection(*p, t1), cw.PointedDirection(*q, t2))
        moved = cw.cw_distance(
            cw.PointedDirection(p[0] + v[0], p[1] + v[1], t1),
            cw.PointedDirection(q[0] + v[0], q[1] + v[1], t2),
        )
        if math.isinf(base):
            assert math.isinf(moved)
        else:
            assert moved == pytest.approx(base, rel=1e-12)


def _wrap(t):
    w = math.remainder(t, 2 * math.pi)
    return w if -math.pi < w <= math.pi else math.pi


def test_distance_rotation_equivariance():
    rng = np.random.default_rng(4)
    hits = 0
    for _ in range(300):
        p = rng.uniform(-3, 3, 2)
        q = rng.uniform(-3, 3, 2)
        t1, t2, phi = rng.uniform(-2, 2, 3)
        base = cw.cw_distance(cw.PointedDirection(*p, _wrap(t1)), cw.PointedDirection(*q, _wrap(t2)))
        c, s = math.cos(phi), math.sin(phi)
        rot = lambda u: (c * u[0] - s * u[1], s * u[0] + c * u[1])
        moved = cw.cw_distance(
            cw.PointedDirection(*rot(p), _wrap(t1 + phi)),
            cw.PointedDirection(*rot(q), _wrap(t2 + phi)),
        )
        if math.isfinite(base):
            hits += 1
            assert moved == pytest.approx(base, rel=1e-9, abs=1e-9)
        else:
            assert math.isinf(moved)
    assert hits > 50


def test_asymmetry_witness():
    p1 = cw.PointedDirection(0.0, 0.0, 0.0)
    p2 = cw.PointedDirection(1.0, 1.0, math.atan(2.0))
    forward = cw.cw_distance(p2, p1)
    backward = cw.cw_distance(p1, p2)
    assert forward == pytest.approx(4.0 + math.sqrt(2.0), rel=1e-12)
    assert forward != pytest.approx(backward, rel=1e-6)


def test_small_s_mask_is_empty():
    for kind in cw.MASK_KINDS:
        assert not cw.basic_mask(kind, 0.1, 64).mask.any()


def test_euclidean_exclusion():
    # the cell holding (2, 0) cannot enter any mask below s = 2
    m = cw.basic_mask("+R", 1.0, 64)
    h = m.cell_size
    i = int((2.0 + 10.0) / h)
    j = int((10.0 - 0.0) / h)
    assert not m.mask[i, j]


def test_known_member_cell():
    m = cw.basic_mask("+R", 2.0, 64)
    h = m.cell_size
    i = int((1.0 + 10.0) / h)
    j = int((10.0 - math.tan(math.pi / 6) / 2.0) / h)
    assert m.mask[i, j]
    # the defining distance at the exact point is ~1.374
    assert cw.cw_distance_canonical(1.0, math.tan(math.pi / 6) / 2, math.pi / 6) == pytest.approx(
        1.374, abs=2e-3
    )


def test_mask_monotone_in_s():
    for kind in cw.MASK_KINDS:
        prev = cw.basic_mask(kind, 0.5, 64).mask
        for s in np.arange(1.0, 8.5, 0.5):
            cur = cw.basic_mask(kind, float(s), 64).mask
            assert not (prev & ~cur).any()
            prev = cur


def test_mask_respects_half_plane():
    for kind, sign in (("+R", 1), ("+L", -1), ("-R", 1), ("-L", -1)):
        m = cw.basic_mask(kind, 4.0, 64)
        gx = -10.0 + (np.arange(64) + 0.5) * m.cell_size
        rows = np.nonzero(m.mask.any(axis=1))[0]
        assert (np.sign(gx[rows]) == sign).all()


def test_rotate_identity_and_full_turn():
    m = cw.basic_mask("+R", 3.0, 64)
    assert np.array_equal(cw.rotate_mask(m, 0.0), m.mask)
    assert np.array_equal(cw.rotate_mask(m, 2 * math.pi), m.mask)


def _hausdorff_cells(a, b):
    from scipy.ndimage import distance_transform_edt

    if not a.any() and not b.any():
        return 0.0
    d_b = distance_transform_edt(~b)
    d_a = distance_transform_edt(~a)
    return max(d_b[a].max() if a.any() else 0, d_a[b].max() if b.any() else 0)


def test_half_turn_matches_reflected_partner():
    # rotating +R by pi lands on -L reflected about the first axis
    m = cw.basic_mask("+R", 4.0, 64)
    turned = cw.rotate_mask(m, math.pi)
    partner = cw.basic_mask("-L", 4.0, 64).mask[:, ::-1]
    assert _hausdorff_cells(turned, partner) <= 1.5


def test_bad_mask_arguments():
    with pytest.raises(ValueError):
        cw.basic_mask("+X", 1.0, 64)
    with pytest.raises(ValueError):
        cw.basic_mask("+R", -1.0, 64)
    with pytest.raises(ValueError):
        cw.basic_mask("+R", 1.0, 4)
