from collections import Counter
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdcolor.arrangement import build_arrangement, stats_row
from pdcolor.coloring import Coloring
from pdcolor.constructions import DEFAULT_BASE, gen_homothets, gen_random_disks
from pdcolor.geom import ConvexPolygon, Scene
from pdcolor.hypergraph import (Graph, IntersectionHypergraph, build_intersection_hypergraph,
                                delaunay_graph, point_closure)
from pdcolor.verify import (brute_force_planar, check_conflict_free, check_count_bounds,
                            check_planarity, check_proper, raster_face_counts, shattered_witness,
                            trace_family, vc_dimension, vc_dimension_trace_first)


def hypergraph(n, edges, small=()):
    hg = IntersectionHypergraph(n)
    for e in edges:
        hg.add(e, None)
    hg.small_traces.update(frozenset(t) for t in small)
    return hg


def col(*c):
    return Coloring.from_colors(c)


def complete(n):
    return Graph(n, frozenset(combinations(range(n), 2)))


# -- colorings ---------------------------------------------------------------

def test_check_proper_examples():
    rep = check_proper(hypergraph(2, [(0, 1)]), col(0, 0))
    assert not rep.passed and rep.details["hyperedge"] == [0, 1]
    assert check_proper(hypergraph(2, [(0, 1)]), col(0, 1)).passed
    with pytest.raises(ValueError):
        check_proper(hypergraph(3, [(0, 1)]), col(0, 1))


def test_check_conflict_free_examples():
    assert check_conflict_free(hypergraph(3, [(0, 1, 2)]), col(0, 0, 1)).passed
    rep = check_conflict_free(hypergraph(4, [(0, 1, 2, 3)]), col(0, 0, 1, 1))
    assert not rep.passed and rep.details["hyperedge"] == [0, 1, 2, 3]


def test_failed_reports_carry_a_reverifiable_counterexample():
    hg = hypergraph(4, [(0, 1), (1, 2, 3), (0, 3)])
    c = col(0, 1, 1, 1)
    rep = check_proper(hg, c)
    assert not rep.passed
    e = rep.details["hyperedge"]
    assert tuple(e) in hg.edges and len({c.colors[v] for v in e}) == 1


# -- planarity ---------------------------------------------------------------

def test_planarity_examples():
    assert check_planarity(complete(4)).passed
    rep = check_planarity(complete(5))
    assert not rep.passed
    assert len(rep.details["kuratowski_subgraph"]) == 10
    assert not brute_force_planar(complete(5))
    assert brute_force_planar(complete(4))


def test_k33_is_not_planar():
    k33 = Graph(6, frozenset((i, j) for i in range(3) for j in range(3, 6)))
    assert not check_planarity(k33).passed
    assert not brute_force_planar(k33)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7).flatmap(lambda n: st.tuples(
    st.just(n), st.sets(st.sampled_from(list(combinations(range(n), 2)) or [(0, 0)]), max_size=14)
    if n > 1 else st.just(set()))))
def test_planarity_agrees_with_rotation_system_search(case):
    n, edges = case
    g = Graph(n, frozenset(edges))
    assert check_planarity(g).passed == brute_force_planar(g)


def test_closed_homothet_delaunay_graph_is_planar():
    B = gen_homothets(DEFAULT_BASE, 30, 4, (0.3, 1.2), (0, 0, 8, 8))
    F = gen_homothets(DEFAULT_BASE, 100, 5, (0.1, 1.5), (0, 0, 8, 8), id_offset=30)
    scene = Scene(tuple(B), tuple(F))
    closed = point_closure(scene, build_intersection_hypergraph(scene))
    assert check_planarity(delaunay_graph(closed)).passed


# -- VC-dimension ------------------------------------------------------------

def brute_vc(family, n):
    best = -1 if not family else 0
    for k in range(1, n + 1):
        for S in combinations(range(n), k):
            if len({frozenset(S) & t for t in family}) == 2 ** k:
                best = k
    return best


def test_vc_examples():
    assert vc_dimension(hypergraph(2, [(0, 1)], small=[(), (0,), (1,)])) == 2
    assert vc_dimension(hypergraph(2, [(0, 1)], small=[()])) == 1
    assert vc_dimension(hypergraph(2, [(0, 1)], small=[()]), include_small_traces=False) == 0
    assert vc_dimension(IntersectionHypergraph(3)) == -1


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 7).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.sets(st.integers(0, n - 1), max_size=n), max_size=30))))
def test_vc_routes_agree_with_brute_force(case):
    n, sets = case
    hg = hypergraph(n, [s for s in sets if len(s) >= 2], small=[s for s in sets if len(s) < 2])
    fam = trace_family(hg)
    d = vc_dimension(hg)
    assert d == vc_dimension_trace_first(hg) == brute_vc(fam, n)
    if d > 0:
        S, traces = shattered_witness(hg, d)
        assert len(traces) == 2 ** d
        assert all(set(k) == set(v) & set(S) for k, v in traces.items())


def test_random_disks_have_vc_at_most_four():
    B = gen_random_disks(12, 8, (0.5, 2.0), (0, 0, 6, 6))
    F = gen_random_disks(400, 9, (0.05, 3.0), (0, 0, 6, 6), id_offset=12)
    hg = build_intersection_hypergraph(Scene(tuple(B), tuple(F)))
    d = vc_dimension(hg)
    assert d <= 4
    assert d == vc_dimension_trace_first(hg)


def test_vc_refuses_large_ground_sets():
    with pytest.raises(ValueError):
        vc_dimension(hypergraph(26, [(0, 1)]))


# -- counts ------------------------------------------------------------------

def square(rid, x, y, s=1):
    return ConvexPolygon(rid, ((x, y), (x + s, y), (x + s, y + s), (x, y + s)))


def test_count_bounds_examples():
    rep = check_count_bounds(stats_row(build_arrangement([square(i, 3 * i, 0) for i in range(4)])))
    assert rep.passed and rep.details == {"n": 4, "v": 0, "e": 4}
    h = Fraction(1, 2)
    rep = check_count_bounds(stats_row(build_arrangement([square(0, 0, 0), square(1, h, h)])),
                             census={2: 3, 3: 1})
    assert rep.passed
    assert rep.details["census_ratios"] == {2: 3 / 16, 3: 4 / 54}
    assert not check_count_bounds({"n": 1, "union_vertex_count": 4, "union_edge_count": 3}).passed


def test_raster_face_counts_on_nested_squares():
    counts = raster_face_counts([square(0, 0, 0, 4), square(1, 1, 1, 1)], 0.25)
    assert counts == Counter({0: 1, 1: 1, 2: 1})
