import math

import numpy as np
import pytest
from scipy import ndimage

from tiltrec import fileio
from tiltrec.phantoms import FIXTURES, PhantomSpec, fixture, make_phantom


def boundary_components(binary):
    """Contour oracle: 8-connected components of the boundary pixel set."""
    inner = ndimage.binary_erosion(binary, np.ones((3, 3)), border_value=0)
    boundary = binary & ~inner
    _, count = ndimage.label(boundary, structure=np.ones((3, 3)))
    return count


def test_annulus_area_matches_formula():
    spec = PhantomSpec("annulus", 256, (0.5, 0.5), 0.3, 0.15)
    img = make_phantom(spec)
    expected = math.pi * (0.3**2 - 0.15**2) * 256**2
    assert img.data.sum() == pytest.approx(expected, rel=0.02)


def test_annulus_two_boundary_components():
    img = make_phantom(PhantomSpec("annulus", 256, (0.5, 0.5), 0.3, 0.15))
    assert boundary_components(img.data > 0.5) == 2


def test_annulus_boundary_radii():
    spec = PhantomSpec("annulus", 256, (0.5, 0.5), 0.3, 0.15)
    binary = make_phantom(spec).data > 0.5
    inner = ndimage.binary_erosion(binary, np.ones((3, 3)), border_value=0)
    ys, xs = np.where(binary & ~inner)
    r = np.hypot((ys + 0.5) / 256 - 0.5, (xs + 0.5) / 256 - 0.5) * 256
    near_inner = np.abs(r - 0.15 * 256) <= 1.0
    near_outer = np.abs(r - 0.3 * 256) <= 1.0
    assert (near_inner | near_outer).all()


def test_empty_ellipse_group():
    img = make_phantom(PhantomSpec("ellipse-group", 64, ellipses=()))
    assert not img.data.any()


def test_phantom_is_binary_and_deterministic():
    for name in FIXTURES:
        spec = fixture(name, 128)
        a = make_phantom(spec).data
        b = make_phantom(spec).data
        assert set(np.unique(a)) <= {0.0, 1.0}
        assert np.array_equal(a, b)


def test_blob_and_highcurv_simply_connected_nonconvex():
    for name in ("blob", "highcurv"):
        img = make_phantom(fixture(name, 256))
        binary = img.data > 0.5
        _, count = ndimage.label(binary)
        assert count == 1
        assert boundary_components(binary) == 1
        filled = ndimage.binary_fill_holes(binary)
        assert np.array_equal(filled, binary)
        hull_like = ndimage.binary_closing(binary, np.ones((25, 25)), border_value=0)
        assert (hull_like & ~binary).sum() > 50  # visibly non-convex


def test_overlapping_ellipses_rejected():
    spec = PhantomSpec(
        "ellipse-group",
        128,
        ellipses=((0.4, 0.5, 0.15, 0.1, 0.0), (0.5, 0.5, 0.15, 0.1, 30.0)),
    )
    with pytest.raises(ValueError, match="overlap"):
        make_phantom(spec)


def test_fixture_ellipses_disjoint():
    img = make_phantom(fixture("ellipses", 256))
    _, count = ndimage.label(img.data > 0.5)
    assert count == 4


def test_margin_enforced():
    with pytest.raises(ValueError, match="margin"):
        make_phantom(PhantomSpec("annulus", 64, (0.5, 0.5), 0.48, 0.2))


def test_size_validation():
    with pytest.raises(ValueError):
        PhantomSpec("annulus", 100)
    with pytest.raises(ValueError):
        PhantomSpec("annulus", 16)
    with pytest.raises(ValueError):
        PhantomSpec("wiggle", 64)


def test_unknown_fixture():
    with pytest.raises(KeyError):
        fixture("nope", 64)


def test_custom_curve_square():
    pts = [(0.3, 0.3), (0.7, 0.3), (0.7, 0.7), (0.3, 0.7)]
    img = make_phantom(PhantomSpec("custom-curve", 64, curve_points=tuple(pts)))
    assert img.data.sum() == pytest.approx(0.4 * 0.4 * 64 * 64, rel=0.05)


def test_pgm_roundtrip(tmp_path):
    img = make_phantom(fixture("annulus", 64))
    path = tmp_path / "a.pgm"
    fileio.write_pgm(path, img.data > 0.5)
    back = fileio.read_pgm(path)
    assert np.array_equal(back > 0, img.data > 0.5)


def test_pfm_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    data = rng.random((32, 32))
    path = tmp_path / "a.pfm"
    fileio.write_pfm(path, data)
    back = fileio.read_pfm(path)
    assert np.allclose(back, data, atol=1e-6)
