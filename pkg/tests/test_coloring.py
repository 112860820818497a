import math
from itertools import combinations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdcolor.arrangement import build_arrangement, face_representatives
from pdcolor.coloring import (BudgetExceeded, Coloring, chromatic_number, color_wrt_points,
                              conflict_free_coloring, degeneracy, exact_graph_coloring,
                              exact_hypergraph_coloring, greedy_degeneracy_coloring,
                              greedy_hypergraph_coloring, product_coloring, product_pipeline,
                              proper_color_hypergraph)
from pdcolor.constructions import gen_homothets, gen_random_disks, k4_scene
from pdcolor.geom import ConvexPolygon, Scene, point_in_region
from pdcolor.hypergraph import (Graph, IntersectionHypergraph, build_intersection_hypergraph,
                                delaunay_graph, point_closure)
from pdcolor.verify import check_conflict_free, check_planarity, check_proper

SQUARE = ConvexPolygon(-1, ((0, 0), (1, 0), (1, 1), (0, 1)))


def complete(n):
    return Graph(n, frozenset(combinations(range(n), 2)))


def hypergraph(n, edges):
    hg = IntersectionHypergraph(n)
    for e in edges:
        hg.add(e, None)
    return hg


def graph_proper(g, col):
    return all(col.colors[u] != col.colors[v] for u, v in g.edges)


def brute_chromatic(g):
    for k in range(1, g.n + 1):
        for cols in product(range(k), repeat=g.n):
            if all(cols[u] != cols[v] for u, v in g.edges):
                return k
    return max(g.n, 1)


def brute_hypergraph_colorable(hg, k):
    return any(all(len({cols[v] for v in e}) > 1 for e in hg.edges)
               for cols in product(range(k), repeat=hg.n))


graphs = st.integers(1, 8).flatmap(lambda n: st.builds(
    lambda es: Graph(n, frozenset(es)),
    st.sets(st.sampled_from(list(combinations(range(n), 2)) or [(0, 0)]), max_size=20)
    if n > 1 else st.just(set())))


def disk_scene(n, m, seed, box=(0, 0, 8, 8)):
    B = gen_random_disks(n, seed, (0.5, 2.0), box)
    F = gen_random_disks(m, seed + 1, (0.2, 2.0), box, id_offset=n)
    return Scene(tuple(B), tuple(F))


# -- graphs ------------------------------------------------------------------

def test_greedy_degeneracy_examples():
    assert greedy_degeneracy_coloring(Graph(5, frozenset())).palette_size == 1
    assert greedy_degeneracy_coloring(complete(4)).palette_size == 4


@settings(max_examples=80, deadline=None)
@given(graphs)
def test_greedy_degeneracy_palette_bound(g):
    col = greedy_degeneracy_coloring(g)
    assert graph_proper(g, col)
    assert col.palette_size <= degeneracy(g) + 1


def test_k4_needs_four_colors():
    assert exact_graph_coloring(complete(4), 3) is None
    col = exact_graph_coloring(complete(4), 4)
    assert col is not None and graph_proper(complete(4), col) and col.optimal


@settings(max_examples=60, deadline=None)
@given(graphs)
def test_chromatic_number_matches_brute_force(g):
    assert chromatic_number(g) == brute_chromatic(g)


def test_budget_is_enforced():
    with pytest.raises(BudgetExceeded):
        exact_graph_coloring(complete(9), 8, budget=5)


def test_planar_delaunay_graphs_color_with_four():
    for seed in range(6):
        scene = disk_scene(25, 100, seed)
        closed = point_closure(scene, build_intersection_hypergraph(scene))
        g = delaunay_graph(closed)
        assert check_planarity(g).passed
        assert greedy_degeneracy_coloring(g).palette_size <= 6
        col = exact_graph_coloring(g, 4)
        assert col is not None and graph_proper(g, col)


# -- hypergraphs -------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.sets(st.integers(0, n - 1), min_size=2, max_size=4), max_size=10))),
    st.integers(1, 3))
def test_exact_hypergraph_coloring_matches_brute_force(case, k):
    n, edges = case
    hg = hypergraph(n, edges)
    col = exact_hypergraph_coloring(hg, k)
    assert (col is not None) == brute_hypergraph_colorable(hg, k)
    if col is not None:
        assert check_proper(hg, col).passed


def test_greedy_hypergraph_coloring_is_proper():
    hg = hypergraph(6, [(0, 1, 2), (2, 3), (3, 4, 5), (0, 5), (1, 4)])
    assert check_proper(hg, greedy_hypergraph_coloring(hg)).passed


def test_single_hyperedge_needs_two_colors():
    col = proper_color_hypergraph(None, hypergraph(2, [(0, 1)]))
    assert col.palette_size == 2


def test_k4_instance_needs_exactly_four():
    scene = k4_scene()
    hg = build_intersection_hypergraph(scene)
    assert exact_hypergraph_coloring(hg, 3) is None
    col = proper_color_hypergraph(scene, hg)
    assert col.palette_size == 4 and check_proper(hg, col).passed


@pytest.mark.parametrize("seed", range(5))
def test_random_disks_closed_use_at_most_four(seed):
    scene = disk_scene(20, 100, seed)
    closed = point_closure(scene, build_intersection_hypergraph(scene))
    col = proper_color_hypergraph(scene, closed)
    assert col.palette_size <= 4
    # straight-loop recount independent of check_proper
    for e in closed.edges:
        assert len({col.colors[v] for v in e}) > 1


def test_budget_fallback_is_flagged():
    scene = disk_scene(20, 100, 0)
    closed = point_closure(scene, build_intersection_hypergraph(scene))
    col = proper_color_hypergraph(scene, closed, budget=1)
    assert col.method == "greedy_fallback(budget)"
    assert not col.optimal
    assert check_proper(closed, col).passed


# -- points, products --------------------------------------------------------

def test_color_wrt_points_examples():
    disjoint = Scene(tuple(gen_homothets(SQUARE, 1, 0)) + tuple(
        gen_homothets(SQUARE, 1, 1, (1, 1), (20, 20, 21, 21), id_offset=1)))
    assert color_wrt_points(disjoint).palette_size == 1
    a = ConvexPolygon(0, ((0, 0), (2, 0), (2, 2), (0, 2)))
    b = ConvexPolygon(1, ((1, 1), (3, 1), (3, 3), (1, 3)))
    assert color_wrt_points(Scene((a, b))).palette_size == 2


def test_color_wrt_points_on_square_homothets():
    B = gen_homothets(SQUARE, 15, 3, (0.5, 2.0), (0, 0, 6, 6))
    col = color_wrt_points(Scene(tuple(B)))
    arr = build_arrangement(B)
    for p in face_representatives(arr, 2):
        members = [i for i, b in enumerate(B) if point_in_region(p, b)]
        assert len({col.colors[i] for i in members}) > 1


def test_product_coloring_examples():
    b = Coloring.from_colors([2, 0, 1, 0])
    same = product_coloring(Coloring.from_colors([0, 0, 0, 0]), b)
    assert same.colors == b.colors
    p = product_coloring(Coloring.from_colors([0, 1]), Coloring.from_colors([0, 0]))
    assert p.palette_size == 2 and p.colors[0] != p.colors[1]
    with pytest.raises(ValueError):
        product_coloring(Coloring.from_colors([0]), b)


@pytest.mark.parametrize("seed", range(3))
def test_product_pipeline_is_proper(seed):
    scene = disk_scene(20, 60, seed)
    closed = point_closure(scene, build_intersection_hypergraph(scene))
    col, parts = product_pipeline(scene, closed)
    assert check_proper(closed, col).passed
    if not parts["escalated"]:
        assert col.palette_size <= parts["points_palette"] * parts["restricted_palette"]


# -- conflict-free -----------------------------------------------------------

def test_conflict_free_examples():
    scene = disk_scene(2, 0, 0)
    one = hypergraph(2, [(0, 1)])
    col = conflict_free_coloring(Scene(scene.B, ()), one, close=False)
    assert col.palette_size <= 2 and check_conflict_free(one, col).passed
    far = Scene(tuple(gen_random_disks(1, 0)) + tuple(gen_random_disks(1, 1, bbox=(50, 50, 60, 60),
                                                                        id_offset=1)), ())
    col = conflict_free_coloring(far, IntersectionHypergraph(2), close=False)
    assert col.palette_size == 1


def test_conflict_free_rounds_use_proper_colorings():
    scene = disk_scene(24, 60, 7)
    hg = build_intersection_hypergraph(scene)
    seen = []

    def checked(sub, sub_hg):
        col = proper_color_hypergraph(sub, sub_hg)
        assert check_proper(sub_hg, col).passed
        seen.append(len(sub.B))
        return col

    col = conflict_free_coloring(scene, hg, checked)
    assert check_conflict_free(hg, col).passed
    assert col.palette_size == len(seen)
    assert seen == sorted(seen, reverse=True)


def test_conflict_free_64_disks():
    side = 2.5 * math.sqrt(64)
    B = gen_random_disks(64, 1, (0.5, 2.0), (0, 0, side, side))
    F = gen_random_disks(128, 2, (0.2, 2.5), (0, 0, side, side), id_offset=64)
    scene = Scene(tuple(B), tuple(F))
    hg = build_intersection_hypergraph(scene)
    col = conflict_free_coloring(scene, hg)
    assert col.palette_size <= math.ceil(math.log(64) / math.log(4 / 3)) + 1 == 16
    assert check_conflict_free(hg, col).passed


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_conflict_free_property(seed):
    scene = disk_scene(10, 25, seed, (0, 0, 5, 5))
    hg = point_closure(scene, build_intersection_hypergraph(scene))
    col = conflict_free_coloring(scene, hg, close=False)
    assert check_conflict_free(hg, col).passed
