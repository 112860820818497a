"""Proper and conflict-free colorings of graphs and hypergraphs."""

from __future__ import annotations

import sys
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .arrangement import build_arrangement, face_representatives
from .geom import PointMass, Scene
from .hypergraph import (Graph, IntersectionHypergraph, _membership, build_intersection_hypergraph,
                         delaunay_graph, point_closure, restricted_delaunay_graph, supports)

DEFAULT_BUDGET = 10 ** 7


class BudgetExceeded(RuntimeError):
    """The exact search ran out of node expansions."""


@dataclass(frozen=True)
class Coloring:
    colors: tuple
    palette_size: int
    method: str = ""
    optimal: bool = False

    @classmethod
    def from_colors(cls, colors: Sequence[int], method: str = "", optimal: bool = False) -> Coloring:
        """Compact the used colors to ``0..k-1`` keeping their relative order."""
        used = sorted(set(colors))
        rank = {c: i for i, c in enumerate(used)}
        return cls(tuple(rank[c] for c in colors), len(used), method, optimal)

    def __len__(self) -> int:
        return len(self.colors)

    def to_json(self) -> dict:
        return {"colors": list(self.colors), "palette": self.palette_size,
                "method": self.method, "optimal": self.optimal}

    @classmethod
    def from_json(cls, data: dict) -> Coloring:
        return cls.from_colors(data["colors"], data.get("method", ""), bool(data.get("optimal", False)))


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------

def degeneracy_order(g: Graph) -> tuple:
    """Removal order by repeated minimum degree (ties: lowest index) and the degeneracy."""
    adj = g.adjacency()
    deg = [len(a) for a in adj]
    alive = set(range(g.n))
    order = []
    k = 0
    while alive:
        v = min(alive, key=lambda u: (deg[u], u))
        k = max(k, deg[v])
        order.append(v)
        alive.discard(v)
        for u in adj[v]:
            if u in alive:
                deg[u] -= 1
    return order, k


def degeneracy(g: Graph) -> int:
    return degeneracy_order(g)[1]


def greedy_degeneracy_coloring(g: Graph) -> Coloring:
    order, _ = degeneracy_order(g)
    adj = g.adjacency()
    colors = [-1] * g.n
    for v in reversed(order):
        taken = {colors[u] for u in adj[v]}
        c = 0
        while c in taken:
            c += 1
        colors[v] = c
    return Coloring.from_colors(colors, "greedy_degeneracy", False)


def exact_graph_coloring(g: Graph, k: int, budget: int = DEFAULT_BUDGET) -> Optional[Coloring]:
    """A proper ``k``-coloring, or ``None`` when none exists.

    DSATUR backtracking: branch on the uncolored vertex with the most distinct
    neighbour colors (ties: lowest index) and never open more than one new
    color per node.  Raises :class:`BudgetExceeded` after ``budget`` nodes.
    """
    if k < 1:
        raise ValueError("k must be positive")
    n = g.n
    adj = [sorted(a) for a in g.adjacency()]
    colors = [-1] * n
    # sat[v][c] = number of coloured neighbours of v with colour c
    sat = [[0] * k for _ in range(n)]
    nodes = 0

    def pick():
        best, key = -1, None
        for v in range(n):
            if colors[v] < 0:
                s = sum(1 for c in sat[v] if c)
                kv = (-s, v)
                if key is None or kv < key:
                    best, key = v, kv
        return best

    def solve(used: int) -> bool:
        nonlocal nodes
        v = pick()
        if v < 0:
            return True
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"more than {budget} nodes")
        for c in range(min(used + 1, k)):
            if sat[v][c]:
                continue
            colors[v] = c
            for u in adj[v]:
                sat[u][c] += 1
            if solve(max(used, c + 1)):
                return True
            for u in adj[v]:
                sat[u][c] -= 1
            colors[v] = -1
        return False

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * n + 100))
    try:
        ok = solve(0)
    finally:
        sys.setrecursionlimit(limit)
    if not ok:
        return None
    return Coloring.from_colors(colors, f"exact_graph_k{k}", True)


def chromatic_number(g: Graph, budget: int = DEFAULT_BUDGET) -> int:
    k = 1
    while exact_graph_coloring(g, k, budget) is None:
        k += 1
    return k


# ---------------------------------------------------------------------------
# hypergraphs
# ---------------------------------------------------------------------------

def _incidence(hg: IntersectionHypergraph):
    edges = [e for e in hg.hyperedges]
    inc = [[] for _ in range(hg.n)]
    for idx, e in enumerate(edges):
        for v in e:
            inc[v].append(idx)
    return edges, inc


def exact_hypergraph_coloring(hg: IntersectionHypergraph, k: int,
                              budget: int = DEFAULT_BUDGET) -> Optional[Coloring]:
    """Branch and bound over color assignments with forward checking.

    An edge whose vertices but one are colored alike forbids that color on
    the remaining vertex.  Branches on the vertex with the fewest allowed
    colors (ties: most incident edges, then lowest index).
    """
    n = hg.n
    edges, inc = _incidence(hg)
    uncolored = [len(e) for e in edges]
    counts = [dict() for _ in edges]
    colors = [-1] * n
    nodes = 0

    def forbidden(v):
        out = set()
        for ei in inc[v]:
            if uncolored[ei] == 1 and len(counts[ei]) == 1:
                out.update(counts[ei])
        return out

    def assign(v, c):
        colors[v] = c
        for ei in inc[v]:
            uncolored[ei] -= 1
            counts[ei][c] = counts[ei].get(c, 0) + 1

    def unassign(v, c):
        colors[v] = -1
        for ei in inc[v]:
            uncolored[ei] += 1
            counts[ei][c] -= 1
            if not counts[ei][c]:
                del counts[ei][c]

    def solve(used: int) -> bool:
        nonlocal nodes
        best, best_key, best_allowed = -1, None, None
        for v in range(n):
            if colors[v] >= 0:
                continue
            bad = forbidden(v)
            allowed = [c for c in range(min(used + 1, k)) if c not in bad]
            key = (len(allowed), -len(inc[v]), v)
            if best_key is None or key < best_key:
                best, best_key, best_allowed = v, key, allowed
                if not allowed:
                    break
        if best < 0:
            return True
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"more than {budget} nodes")
        for c in best_allowed:
            assign(best, c)
            if solve(max(used, c + 1)):
                return True
            unassign(best, c)
        return False

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * n + 100))
    try:
        ok = solve(0)
    finally:
        sys.setrecursionlimit(limit)
    if not ok:
        return None
    return Coloring.from_colors(colors, f"exact_hypergraph_k{k}", True)


def greedy_hypergraph_coloring(hg: IntersectionHypergraph) -> Coloring:
    """Smallest color that does not complete a monochromatic hyperedge."""
    edges, inc = _incidence(hg)
    colors = [-1] * hg.n
    for v in range(hg.n):
        bad = set()
        for ei in inc[v]:
            others = [colors[u] for u in edges[ei] if u != v]
            if all(c >= 0 for c in others) and len(set(others)) == 1:
                bad.add(others[0])
        c = 0
        while c in bad:
            c += 1
        colors[v] = c
    return Coloring.from_colors(colors, "greedy_hypergraph", False)


def proper_color_hypergraph(scene: Optional[Scene], hg: IntersectionHypergraph,
                            budget: int = DEFAULT_BUDGET, k: int = 4) -> Coloring:
    """Proper coloring of ``hg`` aiming at ``k`` colors.

    Colors the Delaunay graph exactly when it supports ``hg``; otherwise
    searches the hypergraph directly.  On budget exhaustion falls back to a
    greedy coloring flagged as not optimal.  The result is always proper.
    """
    if hg.n == 0:
        return Coloring((), 0, "empty", True)
    g = delaunay_graph(hg)
    try:
        if supports(g, hg):
            col = exact_graph_coloring(g, k, budget)
            if col is not None:
                return col
        col = exact_hypergraph_coloring(hg, k, budget)
        if col is not None:
            return col
        reason = "unsat"
    except BudgetExceeded:
        reason = "budget"
    return replace(greedy_hypergraph_coloring(hg), method=f"greedy_fallback({reason})")


# ---------------------------------------------------------------------------
# colorings with respect to points, products, conflict-free framework
# ---------------------------------------------------------------------------

def point_membership(scene: Scene, approx_vertices: int = 64) -> np.ndarray:
    """Rows ``H_p`` for representatives of depth at least two."""
    B = [b for b in scene.B if not isinstance(b, PointMass)]
    if len(B) < 2:
        return np.zeros((0, len(scene.B)), dtype=bool)
    arr = build_arrangement(B, approx_vertices)
    reps = face_representatives(arr, 2)
    P = _membership(scene.B, reps)
    return P[P.sum(axis=1) >= 2]


def color_wrt_points(scene: Scene, approx_vertices: int = 64,
                     membership: Optional[np.ndarray] = None) -> Coloring:
    """Proper coloring of B with respect to all points of the plane.

    Repeatedly removes a vertex of minimum degree in the graph of two-element
    point traces on the remaining family, then colors in reverse order so that
    each vertex avoids its neighbours at removal time.
    """
    n = len(scene.B)
    P = point_membership(scene, approx_vertices) if membership is None else membership
    alive = np.ones(n, dtype=bool)
    removed = []
    for _ in range(n):
        cnt = P[:, alive].sum(axis=1) if len(P) else np.zeros(0, dtype=int)
        rows = P[cnt == 2] & alive[None, :]
        adj = [set() for _ in range(n)]
        for r in rows:
            i, j = np.nonzero(r)[0]
            adj[i].add(int(j))
            adj[j].add(int(i))
        cands = np.nonzero(alive)[0]
        v = int(min(cands, key=lambda u: (len(adj[u]), u)))
        removed.append((v, adj[v]))
        alive[v] = False
    colors = [-1] * n
    for v, nb in reversed(removed):
        taken = {colors[u] for u in nb}
        c = 0
        while c in taken:
            c += 1
        colors[v] = c
    return Coloring.from_colors(colors, "wrt_points", False)


def product_coloring(a: Coloring, b: Coloring) -> Coloring:
    if len(a) != len(b):
        raise ValueError("colorings have different lengths")
    colors = [x * b.palette_size + y for x, y in zip(a.colors, b.colors)]
    return Coloring.from_colors(colors, "product", False)


def product_pipeline(scene: Scene, hg: IntersectionHypergraph, approx_vertices: int = 64,
                     budget: int = DEFAULT_BUDGET) -> tuple:
    """Points coloring times a degeneracy coloring of the restricted Delaunay graph.

    Returns ``(coloring, parts)``.  If the product misses a hyperedge of
    ``hg`` (a sampling gap) the exact pipeline is used instead and
    ``parts["escalated"]`` is set.
    """
    from .verify import check_proper

    c1 = color_wrt_points(scene, approx_vertices)
    rd = restricted_delaunay_graph(scene, hg)
    c2 = greedy_degeneracy_coloring(rd)
    col = product_coloring(c1, c2)
    parts = {"points_palette": c1.palette_size, "restricted_palette": c2.palette_size,
             "product_palette": col.palette_size, "escalated": False}
    if not check_proper(hg, col).passed:
        parts["escalated"] = True
        col = proper_color_hypergraph(scene, hg, budget)
    return col, parts


def round_hypergraph(scene: Scene, hg: IntersectionHypergraph, remaining: Sequence[int],
                     close: bool = True, approx_vertices: int = 64) -> IntersectionHypergraph:
    """Hypergraph on the remaining members, rebuilt from the geometry.

    Consists of the F-hyperedges of the sub-family, its point-closure when
    ``close`` is set, and the traces of the point-witnessed hyperedges of
    ``hg``.  Vertices are relabelled to positions in ``remaining``.
    """
    sub = scene.subscene(remaining)
    if scene.all_points:
        out = IntersectionHypergraph(len(remaining))
    else:
        out = build_intersection_hypergraph(sub)
    if close or scene.all_points:
        out = point_closure(sub, out, "arrangement", approx_vertices)
    index = {v: i for i, v in enumerate(remaining)}
    for e, w in hg.edges.items():
        if not isinstance(w, int):
            out.add([index[v] for v in e if v in index], w)
    return out


def conflict_free_coloring(scene: Scene, hg: IntersectionHypergraph,
                           proper_colorer: Callable = proper_color_hypergraph,
                           close: bool = True, approx_vertices: int = 64) -> Coloring:
    """Conflict-free coloring by peeling off the biggest color class.

    Each round properly colors the remaining members, gives the largest class
    (ties: lowest color) the next final color and removes it.  Every
    hyperedge's highest final color then occurs once in it.
    """
    n = len(scene.B)
    final = [-1] * n
    remaining = list(range(n))
    s = 0
    rounds = []
    while remaining:
        sub_hg = round_hypergraph(scene, hg, remaining, close, approx_vertices)
        col = proper_colorer(scene.subscene(remaining), sub_hg)
        sizes = np.bincount(np.asarray(col.colors, dtype=int), minlength=col.palette_size)
        big = int(np.argmax(sizes))
        rounds.append(col.palette_size)
        keep = []
        for pos, v in enumerate(remaining):
            if col.colors[pos] == big:
                final[v] = s
            else:
                keep.append(v)
        remaining = keep
        s += 1
    return Coloring.from_colors(final, f"conflict_free(rounds={len(rounds)},max_c={max(rounds, default=0)})")
