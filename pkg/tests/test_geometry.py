import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arakelian import (Annulus, Circle, Disk, GridSet, HalfPlane, Polygon, Rectangle, Scene,
                       Segment, Window, dilate, distance_transform, rasterize)
from arakelian.errors import ConfigurationError, ResolutionError, ResourceError, SchemaError
from arakelian.geometry import closed_disk, shape_from_dict

from conftest import brute_distance


def test_empty_scene_is_empty():
    w = Window(-1, 1, -1, 1, 0.1)
    s = rasterize(Scene(), w)
    assert s.count == 0 and s.mask.shape == (20, 20)


def test_disk_area_matches_fine_grid_sum():
    w = Window(-2, 2, -2, 2, 0.01)
    s = rasterize(Scene().union(Disk(0j, 1.0)), w)
    # independent oracle: count centres of a grid ten times finer
    hf = 0.001
    xs = -2 + hf * (np.arange(4000) + 0.5)
    fine = sum(int(np.count_nonzero(xs ** 2 + y * y <= 1.0)) for y in xs) * hf * hf
    assert abs(s.area - math.pi) <= 0.02
    assert abs(s.area - fine) <= 0.02


def test_half_plane_marks_exactly_upper_centres():
    w = Window(-1, 1, -1, 1, 0.1)
    s = rasterize(Scene().union(HalfPlane(1j, 0.0)), w)
    ys = -1 + 0.1 * (np.arange(20) + 0.5)
    want = np.repeat((ys >= 0)[:, None], 20, axis=1)
    assert np.array_equal(s.mask, want)


def test_difference_removes_cells():
    w = Window(-2, 2, -2, 2, 0.05)
    s = rasterize(Scene().union(Disk(0j, 1.5)).difference(Disk(0j, 0.5)), w)
    ring = rasterize(Scene().union(Annulus(0j, 0.5, 1.5)), w)
    # the annulus is closed at both radii; the difference opens the inner one
    z = w.centers()
    assert np.array_equal(s.mask, (np.abs(z) <= 1.5) & (np.abs(z) > 0.5))
    assert np.array_equal(ring.mask, (np.abs(z) <= 1.5) & (np.abs(z) >= 0.5))


def test_shape_round_trip():
    shapes = [Disk(0.5 + 1j, 2.0), Annulus(0j, 1.0, 2.0), Rectangle(-1, 1, -2, 2),
              HalfPlane(1j, -0.5), Polygon((0j, 1 + 0j, 1j)), Segment(0j, 1 + 1j, 0.2),
              Circle(0j, 1.0, 0.2)]
    scene = Scene(tuple((s, "union") for s in shapes))
    assert Scene.from_list(scene.to_list()) == scene


@pytest.mark.parametrize("bad", [
    {"kind": "disk", "params": {"center": [0, 0], "radius": -1}},
    {"kind": "annulus", "params": {"center": [0, 0], "inner": 2, "outer": 1}},
    {"kind": "blob", "params": {}},
])
def test_bad_shapes_rejected(bad):
    with pytest.raises((SchemaError, ConfigurationError)):
        shape_from_dict(bad)


def test_cell_limit_is_a_resource_error():
    with pytest.raises(ResourceError):
        Window(-100, 100, -100, 100, 1e-3)


def test_thin_circle_is_a_resolution_error():
    w = Window(-2, 2, -2, 2, 0.1)
    with pytest.raises(ResolutionError):
        rasterize(Scene().union(Circle(0j, 1.0, 0.15)), w)


# ---------------------------------------------------------------------------
# dilation


def test_dilate_zero_is_identity():
    w = Window(-1, 1, -1, 1, 0.1)
    s = rasterize(Scene().union(Rectangle(-0.3, 0.4, -0.2, 0.1)), w)
    assert dilate(s, 0) == s


def test_dilate_single_cell_gives_disk():
    w = Window(-1.05, 1.05, -1.05, 1.05, 0.1)
    mask = np.zeros(w.shape, bool)
    mask[10, 10] = True
    assert w.center(10, 10) == 0
    got = dilate(GridSet(w, mask), 1.0)
    z = w.centers()
    assert np.array_equal(got.mask, np.abs(z) <= 1.0 + 1e-9)


def test_dilated_arc_keeps_collar():
    w = Window(-2, 2, -2, 2, 0.05)
    arc = rasterize(Scene().union(Circle(0j, 1.0, 0.1)).difference(HalfPlane(-1j, 0.0)), w)
    out = dilate(arc, 0.3)
    # brute force: distance from every arc centre to every cell left out
    kz = arc.points()
    cz = w.centers()[~out.mask]
    d = np.abs(kz[:, None] - cz[None, :]).min(axis=1)
    assert d.min() >= 0.3


def test_dilate_negative_radius_rejected():
    w = Window(-1, 1, -1, 1, 0.1)
    with pytest.raises(ConfigurationError):
        dilate(GridSet.empty(w), -0.1)


# ---------------------------------------------------------------------------
# distance transform


def test_distance_all_marked_is_infinite():
    w = Window(0, 1, 0, 1, 0.25)
    assert np.all(np.isinf(distance_transform(GridSet.full(w))))


def test_distance_single_unmarked_cell():
    w = Window(0, 2, 0, 2, 0.25)
    mask = np.ones(w.shape, bool)
    mask[3, 5] = False
    d = distance_transform(GridSet(w, mask))
    assert np.allclose(d, np.abs(w.centers() - w.center(3, 5)))


def test_distance_random_64_matches_brute_force():
    rng = np.random.default_rng(7)
    w = Window(0, 4, 0, 4, 1 / 16)
    mask = rng.random(w.shape) < 0.93
    d = distance_transform(GridSet(w, mask))
    assert np.allclose(d, brute_distance(mask, w.h), rtol=0, atol=1e-12)


# ---------------------------------------------------------------------------
# properties


masks = st.integers(0, 2 ** 32 - 1).map(
    lambda seed: np.random.default_rng(seed).random((24, 24)))
disks = st.builds(lambda x, y, r: Disk(complex(x, y), r),
                  st.floats(-1, 1), st.floats(-1, 1), st.floats(0.1, 1.0))


@settings(max_examples=40, deadline=None)
@given(st.lists(disks, min_size=1, max_size=4), disks)
def test_rasterize_is_monotone(base, extra):
    w = Window(-1.5, 1.5, -1.5, 1.5, 0.1)
    scene = Scene(tuple((d, "union") for d in base))
    s = rasterize(scene, w)
    assert np.all(rasterize(scene.union(extra), w).mask >= s.mask)
    assert np.all(rasterize(scene.difference(extra), w).mask <= s.mask)


@settings(max_examples=40, deadline=None)
@given(masks, st.floats(0.0, 0.5), st.floats(0.0, 0.5))
def test_dilate_extensive_and_monotone(noise, r1, r2):
    w = Window(0, 2.4, 0, 2.4, 0.1)
    s = GridSet(w, noise < 0.1)
    lo, hi = sorted((r1, r2))
    a, b = dilate(s, lo), dilate(s, hi)
    assert np.all(a.mask >= s.mask) and np.all(b.mask >= a.mask)


@settings(max_examples=25, deadline=None)
@given(masks, st.floats(0.3, 0.97))
def test_distance_transform_brute_force_property(noise, p):
    w = Window(0, 2.4, 0, 2.4, 0.1)
    mask = noise < p
    if mask.all():
        return
    d = distance_transform(GridSet(w, mask))
    assert np.allclose(d, brute_distance(mask, w.h), rtol=0, atol=1e-12)


def test_closed_disk_contains_its_rim():
    w = Window(-2.0, 2.0, -2.0, 2.0, 0.25)
    d = closed_disk(w, 1.125)
    # centres sit at odd multiples of h/2; |1.125+0.125j| > 1.125
    assert 0.875 + 0.125j in d and 1.125 + 0.125j not in d
