import random
from fractions import Fraction

import pytest

from pdcolor.arrangement import build_arrangement, union_complexity
from pdcolor.constructions import (DEFAULT_BASE, GENERATOR_KINDS, bear_ears_membership_ok,
                                   circle_points, default_epsilon, gen_bear_ears, gen_homothets,
                                   gen_k4_points, gen_lattice_squares, gen_random_disks,
                                   gen_random_points, generate, load_base_polygon)
from pdcolor.geom import Disk, Point2, Scene, dist2, is_pseudo_disk_family, point_in_region, polygonize
from pdcolor.hypergraph import build_intersection_hypergraph


def test_random_disks_sizes_and_bbox():
    assert gen_random_disks(0, 1) == []
    (d,) = gen_random_disks(1, 1, (0.5, 1.0), (2, 3, 4, 5))
    assert 2 <= d.center.x <= 4 and 3 <= d.center.y <= 5
    assert Fraction(1, 2) <= d.radius <= 1


def test_random_disks_are_deterministic_and_pseudo_disks():
    a = gen_random_disks(50, 9)
    assert a == gen_random_disks(50, 9)
    assert a != gen_random_disks(50, 10)
    assert is_pseudo_disk_family(a).ok


def test_single_homothet_is_a_scaled_copy():
    (h,) = gen_homothets(DEFAULT_BASE, 1, 4)
    base = DEFAULT_BASE.vertices
    s = (h.vertices[1].x - h.vertices[0].x) / (base[1].x - base[0].x)
    t = h.vertices[0] - Point2(s * base[0].x, s * base[0].y)
    assert all(v == Point2(t.x + s * b.x, t.y + s * b.y) for v, b in zip(h.vertices, base))


def test_unit_scale_gives_translates():
    hs = gen_homothets(DEFAULT_BASE, 5, 2, (1, 1))
    for h in hs:
        d = h.vertices[0] - DEFAULT_BASE.vertices[0]
        assert all(v - b == d for v, b in zip(h.vertices, DEFAULT_BASE.vertices))
    assert is_pseudo_disk_family(hs).ok


def test_points_generator():
    pts = gen_random_points(7, 3, (0, 0, 1, 1), id_offset=5)
    assert [p.id for p in pts] == list(range(5, 12))


# -- bear ears ---------------------------------------------------------------

def test_two_point_ear():
    S, F = gen_bear_ears(2)
    assert len(F) == 1
    f = F[0]
    assert all(point_in_region(s.center, f) for s in S)
    central = Disk(99, f.center, f.disk_radius)
    assert not any(point_in_region(s.center, central) for s in S)


@pytest.mark.parametrize("n", [4, 6, 8, 10])
def test_ears_realize_the_complete_graph(n):
    S, F = gen_bear_ears(n)
    assert len(F) == n * (n - 1) // 2
    assert bear_ears_membership_ok(S, F)
    hg = build_intersection_hypergraph(Scene(tuple(S), tuple(F)))
    assert sorted(hg.edges) == [(i, j) for i in range(n) for j in range(i + 1, n)]


def test_ear_radii_follow_the_pair_index():
    n = 5
    S, F = gen_bear_ears(n)
    eps = default_epsilon(n)
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            assert F[k].capsule_radius == (i * n + j) * eps
            assert F[k].disk_radius == 1 + (i * n + j) * eps
            assert {F[k].anchor_i, F[k].anchor_j} == {S[i].center, S[j].center}
            k += 1


def test_epsilon_guard():
    with pytest.raises(ValueError):
        gen_bear_ears(4, Fraction(1, 40))
    with pytest.raises(ValueError):
        gen_bear_ears(1)
    gen_bear_ears(4, Fraction(1, 64))


def test_circle_points_are_close_to_radius_two():
    for p in circle_points(12):
        assert abs(float(dist2(p, Point2(0, 0))) - 4) < 1e-5


def test_ear_subfamilies_have_linear_union():
    S, F = gen_bear_ears(8)
    rings = [polygonize(f, 256) for f in F]
    rng = random.Random(3)
    for _ in range(6):
        m = rng.randint(2, len(F))
        idx = rng.sample(range(len(F)), m)
        e, v = union_complexity(build_arrangement([rings[i] for i in idx]))
        assert e <= 4 * m - 4
        assert v <= e <= v + m


# -- other instances ---------------------------------------------------------

def test_k4_points():
    pts = gen_k4_points(0)
    assert len(pts) == 4
    assert pts == gen_k4_points(0)


def test_generate_every_kind():
    for kind in GENERATOR_KINDS:
        scene = generate(kind, 4, 1)
        ids = [r.id for r in scene.B] + [r.id for r in scene.F]
        assert len(ids) == len(set(ids))
        assert Scene.from_json(scene.to_json()) == scene
    assert len(generate("random_disks", 5, 1).F) == 10
    assert len(generate("random_disks", 5, 1, f_count=3).F) == 3
    with pytest.raises(ValueError):
        generate("spirals", 3, 0)


def test_load_base_polygon():
    tri = load_base_polygon({"vertices": [[0, 0], [1, 0], ["1/2", 1]]})
    scene = generate("homothets", 3, 0, base=tri)
    assert all(len(b.vertices) == 3 for b in scene.B)


def test_lattice_squares_offsets():
    sq = gen_lattice_squares(6, 2)
    h = Fraction(1, 7)
    for i, s in enumerate(sq):
        x = s.vertices[0].x
        assert (x - (i + 1) * h).denominator == 1
