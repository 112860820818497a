from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdcolor.constructions import DEFAULT_BASE, gen_bear_ears, gen_homothets, gen_random_disks
from pdcolor.geom import (ConvexPolygon, DegenerateGeometryError, Disk, Point2,
                          PointMass, PolygonRing, Scene, boundary_intersection_count,
                          common_intersection, contains_points, dyadic, ear_radial, ear_ring,
                          intersection_matrix, is_pseudo_disk_family, point_in_region,
                          polygonize, region_from_json, regions_intersect, segments_intersect,
                          triple_intersection_empty)


def square(rid, x, y, s=1):
    return ConvexPolygon(rid, ((x, y), (x + s, y), (x + s, y + s), (x, y + s)))


def rect(rid, x0, y0, x1, y1):
    return ConvexPolygon(rid, ((x0, y0), (x1, y0), (x1, y1), (x0, y1)))


# -- membership ------------------------------------------------------------

def test_point_in_disk():
    assert point_in_region(Point2(0, 0), Disk(0, (0, 0), 1))
    assert not point_in_region(Point2(2, 0), Disk(0, (0, 0), 1))
    # closed regions
    assert point_in_region(Point2(1, 0), Disk(0, (0, 0), 1))


def test_point_in_ear_contains_its_anchors():
    S, F = gen_bear_ears(5)
    for f in F:
        assert point_in_region(f.anchor_i, f)
        assert point_in_region(f.anchor_j, f)


def test_point_in_polygon_and_point_mass():
    sq = square(0, 0, 0)
    assert point_in_region(Point2(Fraction(1, 2), Fraction(1, 2)), sq)
    assert point_in_region(Point2(1, 1), sq)
    assert not point_in_region(Point2(Fraction(3, 2), 0), sq)
    assert point_in_region(Point2(3, 4), PointMass(1, (3, 4)))
    assert not point_in_region(Point2(3, 5), PointMass(1, (3, 4)))


def test_non_convex_polygon_rejected():
    with pytest.raises(ValueError):
        ConvexPolygon(0, ((0, 0), (2, 0), (1, 1), (2, 2), (0, 2)))
    with pytest.raises(ValueError):
        ConvexPolygon(0, ((0, 0), (0, 1), (1, 1), (1, 0)))  # clockwise


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), min_size=1, max_size=40),
       st.sampled_from(["disk", "poly", "ring", "ear"]))
def test_contains_points_matches_exact_predicate(raw, which):
    pts = [Point2(dyadic(x), dyadic(y)) for x, y in raw]
    if which == "disk":
        r = Disk(0, (Fraction(1, 3), 0), Fraction(3, 2))
        pts.append(Point2(Fraction(1, 3) + Fraction(3, 2), 0))  # boundary point
    elif which == "poly":
        r = DEFAULT_BASE
        pts.append(DEFAULT_BASE.vertices[2])
    elif which == "ring":
        r = PolygonRing(0, ((0, 0), (2, 0), (1, 1), (2, 2), (0, 2)))
        pts.append(Point2(1, 1))
    else:
        r = gen_bear_ears(4)[1][2]
    mine = contains_points(r, pts)
    exact = [r.contains(p) if isinstance(r, PolygonRing) else point_in_region(p, r) for p in pts]
    assert list(mine) == exact


# -- pairwise intersection ---------------------------------------------------

def test_regions_intersect_examples():
    assert not regions_intersect(Disk(0, (0, 0), 1), Disk(1, (3, 0), 1))
    assert regions_intersect(Disk(0, (0, 0), 1), Disk(1, (1, 0), 1))
    a, b = square(0, 0, 0), square(1, Fraction(1, 2), Fraction(1, 2))
    assert regions_intersect(a, b)
    # touching counts: closed regions
    assert regions_intersect(Disk(0, (0, 0), 1), Disk(1, (2, 0), 1))
    assert regions_intersect(square(0, 0, 0), square(1, 1, 0))


def _raster_overlap(a, b, step=0.01, box=(-1, -1, 3, 3)):
    xs = np.arange(box[0], box[2], step)
    X, Y = np.meshgrid(xs, xs)
    pts = [Point2(dyadic(x), dyadic(y)) for x, y in zip(X.ravel(), Y.ravel())]
    return bool((contains_points(a, pts) & contains_points(b, pts)).any())


def test_overlapping_squares_agree_with_raster_oracle():
    a, b = square(0, 0, 0), square(1, Fraction(1, 2), Fraction(1, 2))
    assert regions_intersect(a, b) == _raster_overlap(a, b, step=0.05) is True


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_intersection_matrix_matches_pairwise(seed):
    B = gen_random_disks(5, seed, (0.2, 1.5), (0, 0, 5, 5))
    F = gen_homothets(DEFAULT_BASE, 6, seed + 1, (0.1, 1.0), (0, 0, 5, 5), id_offset=5)
    F += [PointMass(20 + i, p.center) for i, p in enumerate(gen_random_disks(3, seed + 2))]
    M = intersection_matrix(B, F)
    for i, b in enumerate(B):
        for j, f in enumerate(F):
            assert M[i, j] == regions_intersect(b, f)


def test_ear_intersects_only_near_its_anchors():
    S, F = gen_bear_ears(4)
    for f in F:
        hits = {s.id for s in S if regions_intersect(s, f)}
        assert hits == {k for k, s in enumerate(S) if s.center in (f.anchor_i, f.anchor_j)}


# -- boundary crossings ------------------------------------------------------

def test_boundary_intersection_count_examples():
    assert boundary_intersection_count(Disk(0, (0, 0), 1), Disk(1, (1, 0), 1)) == 2
    assert boundary_intersection_count(Disk(0, (0, 0), 1), Disk(1, (3, 0), 1)) == 0
    with pytest.raises(DegenerateGeometryError):
        boundary_intersection_count(Disk(0, (0, 0), 1), Disk(1, (0, 0), 1))


def test_ear_pairs_cross_at_most_four_times():
    S, F = gen_bear_ears(6)
    counts = [boundary_intersection_count(a, b) for a, b in combinations(F, 2)]
    assert max(counts) <= 4
    assert 4 in counts


def _segment_crossings(P, Q):
    """Oracle: count intersecting edge pairs of two polygons."""
    count = 0
    for a, b in P.edges():
        for c, d in Q.edges():
            count += segments_intersect(a, b, c, d)
    return count


def test_plus_of_rectangles_crosses_four_times():
    a = rect(0, -2, Fraction(-1, 2), 2, Fraction(1, 2))
    b = rect(1, Fraction(-1, 2), -2, Fraction(1, 2), 2)
    assert _segment_crossings(a, b) == boundary_intersection_count(a, b) == 4


def test_star_of_squares_is_not_a_pseudo_disk_pair():
    a = rect(0, -1, -1, 1, 1)
    r = dyadic(2 ** 0.5)  # the same square turned by 45 degrees
    b = ConvexPolygon(1, ((r, 0), (0, r), (-r, 0), (0, -r)))
    assert _segment_crossings(a, b) == 8
    assert boundary_intersection_count(a, b) == 8
    rep = is_pseudo_disk_family([a, b, Disk(2, (10, 10), 1)])
    assert not rep.ok
    assert rep.violations == [(0, 1, 8)]


def test_disjoint_disks_are_pseudo_disks():
    disks = [Disk(i, (3 * i, 0), 1) for i in range(6)]
    assert is_pseudo_disk_family(disks).ok


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.booleans())
def test_homothets_are_pseudo_disks(seed, translates_only):
    scale = (1, 1) if translates_only else (0.3, 2.0)
    H = gen_homothets(DEFAULT_BASE, 6, seed, scale, (0, 0, 4, 4))
    for a, b in combinations(H, 2):
        if not regions_intersect(a, b):
            continue
        # edge pairs that meet, counted independently of the checker
        assert _segment_crossings(a, b) <= 2
    assert is_pseudo_disk_family(H).ok


def test_random_disks_are_pseudo_disks():
    rep = is_pseudo_disk_family(gen_random_disks(50, 11))
    assert rep.ok and not rep.approximate


# -- common intersection -----------------------------------------------------

def test_common_intersection_of_disks_and_polygons():
    assert common_intersection([Disk(0, (0, 0), 1), Disk(1, (1, 0), 1), Disk(2, (Fraction(1, 2), 1), 1)])
    assert not common_intersection([Disk(0, (0, 0), 1), Disk(1, (3, 0), 1), Disk(2, (1, 0), 1)])
    # pairwise intersecting, no common point
    tri = [Disk(0, (0, 0), 1), Disk(1, (2, 0), 1), Disk(2, (1, 2), Fraction(13, 10))]
    assert all(regions_intersect(a, b) for a, b in combinations(tri, 2))
    assert not common_intersection(tri)
    assert common_intersection([square(0, 0, 0), square(1, 1, 1), Disk(2, (1, 1), Fraction(1, 10))])


def test_triple_intersection_for_restricted_graph():
    B0, B1 = Disk(0, (0, 0), 1), Disk(1, (Fraction(3, 2), 0), 1)
    lens = Disk(2, (Fraction(3, 4), 0), Fraction(1, 10))
    outside = Disk(3, (Fraction(3, 4), 2), Fraction(13, 10))
    assert triple_intersection_empty(lens, B0, B1) == (False, False)
    empty, _ = triple_intersection_empty(outside, B0, B1)
    assert regions_intersect(outside, B0) and regions_intersect(outside, B1)
    assert empty


# -- serialization and approximation -----------------------------------------

def test_region_json_round_trip():
    S, F = gen_bear_ears(3)
    regions = [Disk(0, (Fraction(1, 3), 2), Fraction(5, 7)), DEFAULT_BASE, S[0], F[0]]
    for r in regions:
        assert region_from_json(r.to_json()) == r
    scene = Scene((regions[0], regions[1]), (F[0],))
    assert Scene.from_json(scene.to_json()) == scene
    assert Scene.from_json(Scene((S[0],)).to_json()).all_points


def test_polygonize_is_inscribed():
    d = Disk(0, (1, 1), 2)
    poly = polygonize(d, 32)
    assert len(poly.vertices) == 32
    assert all(point_in_region(v, d) for v in poly.vertices)


def test_ear_ring_vertices_lie_on_the_ear_boundary():
    f = gen_bear_ears(4)[1][1]
    ring = ear_ring(f, 256)
    v = np.array([p.as_float() for p in ring.vertices])
    o = f.center.as_float()
    th = np.arctan2(v[:, 1] - o[1], v[:, 0] - o[0])
    rad = np.hypot(v[:, 0] - o[0], v[:, 1] - o[1])
    assert np.abs(rad - ear_radial(f, th)).max() < 1e-9
    assert len(ring.vertices) >= 256
