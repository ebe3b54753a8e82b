"""Distance primitives and solid shapes against hand and sampling oracles."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bridgesim.geometry import (
    Box,
    MeshPatch,
    VerticalCylinder,
    dist,
    point_on_polyline,
    point_polyline_distance,
    point_segment_distance,
    point_triangle_distance,
    polyline_length,
)

from oracles import brute_nearest_segment, dense_polyline_distance, exact_segment_distance

coord = st.floats(-100.0, 100.0, allow_nan=False, allow_infinity=False)
point = st.tuples(coord, coord, coord)


def test_segment_distance_perpendicular_foot():
    assert point_segment_distance((5.0, 3.0, 0.0), (0.0, 0.0, 0.0), (10.0, 0.0, 0.0)) == 3.0


def test_segment_distance_clamps_to_endpoints():
    d = point_segment_distance((-3.0, 4.0, 0.0), (0.0, 0.0, 0.0), (10.0, 0.0, 0.0))
    assert d == 5.0
    d = point_segment_distance((13.0, 0.0, 4.0), (0.0, 0.0, 0.0), (10.0, 0.0, 0.0))
    assert d == 5.0


def test_segment_distance_degenerate_segment():
    assert point_segment_distance((1.0, 2.0, 2.0), (1.0, 0.0, 0.0), (1.0, 0.0, 0.0)) == pytest.approx(
        math.sqrt(8.0)
    )


@given(point, point, point)
def test_segment_distance_matches_reference(p, a, b):
    got = point_segment_distance(p, a, b)
    want = exact_segment_distance(p, a, b)
    assert got == pytest.approx(want, abs=1e-9)


def test_polyline_distance_brute_force_agreement():
    rng = random.Random(11)
    for _ in range(300):
        pts = [
            (rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(0, 10))
            for _ in range(rng.randint(2, 6))
        ]
        q = (rng.uniform(-25, 25), rng.uniform(-25, 25), rng.uniform(-5, 15))
        _, want = brute_nearest_segment(q, pts)
        assert point_polyline_distance(q, pts) == pytest.approx(want, abs=1e-9)


def test_polyline_distance_dense_sampling_spot_check():
    pts = [(0.0, 0.0, 0.0), (4.0, 0.0, 0.0), (4.0, 3.0, 0.0)]
    q = (2.0, 1.0, 0.5)
    got = point_polyline_distance(q, pts)
    want = dense_polyline_distance(pts, q, spacing=0.001)
    assert abs(got - want) <= 0.002


def test_polyline_length_and_interpolation():
    pts = [(0.0, 0.0, 0.0), (3.0, 0.0, 0.0), (3.0, 4.0, 0.0)]
    assert polyline_length(pts) == pytest.approx(7.0)
    assert point_on_polyline(pts, 0.0) == (0.0, 0.0, 0.0)
    assert point_on_polyline(pts, 3.0) == (3.0, 0.0, 0.0)
    assert point_on_polyline(pts, 5.0) == pytest.approx((3.0, 2.0, 0.0))
    assert point_on_polyline(pts, 99.0) == (3.0, 4.0, 0.0)


def test_triangle_distance_cases():
    a, b, c = (0.0, 0.0, 0.0), (4.0, 0.0, 0.0), (0.0, 4.0, 0.0)
    # Above the interior: plane distance.
    assert point_triangle_distance((1.0, 1.0, 2.0), a, b, c) == pytest.approx(2.0)
    # Beyond an edge: distance to that edge.
    assert point_triangle_distance((2.0, -3.0, 0.0), a, b, c) == pytest.approx(3.0)
    # Beyond a vertex: distance to that vertex.
    assert point_triangle_distance((-3.0, -4.0, 0.0), a, b, c) == pytest.approx(5.0)


@given(point)
@settings(max_examples=50)
def test_triangle_distance_never_exceeds_vertex_distance(p):
    a, b, c = (0.0, 0.0, 0.0), (6.0, 0.0, 0.0), (0.0, 6.0, 3.0)
    d = point_triangle_distance(p, a, b, c)
    assert d <= min(dist(p, a), dist(p, b), dist(p, c)) + 1e-9


def test_box_distances_and_containment():
    box = Box(min_corner=(0.0, 0.0, 0.0), max_corner=(2.0, 4.0, 6.0))
    assert box.contains((1.0, 2.0, 3.0))
    assert box.contains((0.0, 0.0, 0.0))  # boundary is inside
    assert not box.contains((2.0001, 0.0, 0.0))
    assert box.distance_to_solid((1.0, 2.0, 3.0)) == 0.0
    assert box.distance_to_solid((5.0, 2.0, 3.0)) == 3.0
    assert box.distance_to_solid((5.0, 8.0, 6.0)) == 5.0
    assert box.volume == pytest.approx(48.0)
    assert box.surface_area == pytest.approx(2 * (8.0 + 24.0 + 12.0))
    assert box.aabb == ((0.0, 0.0, 0.0), (2.0, 4.0, 6.0))


def test_box_surface_sampling_lies_on_surface():
    box = Box(min_corner=(-1.0, -2.0, 0.0), max_corner=(1.0, 2.0, 3.0))
    rng = random.Random(5)
    for _ in range(200):
        p = box.sample_surface(rng)
        assert box.distance_to_surface(p) == pytest.approx(0.0, abs=1e-9)
        assert box.contains(p)


def test_cylinder_distances():
    cyl = VerticalCylinder(center_xy=(0.0, 0.0), z_range=(0.0, 10.0), radius=2.0)
    assert cyl.contains((1.0, 0.0, 5.0))
    assert cyl.distance_to_solid((5.0, 0.0, 5.0)) == pytest.approx(3.0)
    assert cyl.distance_to_solid((0.0, 0.0, 13.0)) == pytest.approx(3.0)
    # Outside both radially and axially: Euclidean combination.
    assert cyl.distance_to_solid((5.0, 0.0, 14.0)) == pytest.approx(5.0)
    assert cyl.volume == pytest.approx(math.pi * 4.0 * 10.0)


def test_cylinder_surface_sampling():
    cyl = VerticalCylinder(center_xy=(1.0, -1.0), z_range=(0.0, 4.0), radius=1.5)
    rng = random.Random(9)
    for _ in range(200):
        p = cyl.sample_surface(rng)
        assert cyl.distance_to_surface(p) == pytest.approx(0.0, abs=1e-9)


def test_mesh_patch_distance_and_sampling():
    patch = MeshPatch(
        vertices=((0.0, 0.0, 0.0), (4.0, 0.0, 0.0), (4.0, 4.0, 0.0), (0.0, 4.0, 0.0)),
        triangles=((0, 1, 2), (0, 2, 3)),
    )
    assert patch.distance_to_solid((2.0, 2.0, 3.0)) == pytest.approx(3.0)
    assert patch.distance_to_solid((2.0, 2.0, 0.0)) == pytest.approx(0.0)
    assert patch.surface_area == pytest.approx(16.0)
    lo, hi = patch.aabb
    rng = random.Random(3)
    for _ in range(200):
        p = patch.sample_surface(rng)
        assert patch.distance_to_surface(p) == pytest.approx(0.0, abs=1e-9)
        for k in range(3):
            assert lo[k] - 1e-9 <= p[k] <= hi[k] + 1e-9
