"""Checkers for colorings, planarity, VC-dimension and count identities."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from typing import Optional

import networkx as nx
import numpy as np

from .coloring import Coloring
from .hypergraph import Graph, IntersectionHypergraph


@dataclass(frozen=True)
class VerificationReport:
    claim: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"claim": self.claim, "passed": self.passed, "details": self.details}


def _check_len(hg: IntersectionHypergraph, col: Coloring):
    if len(col.colors) != hg.n:
        raise ValueError(f"coloring has {len(col.colors)} entries for {hg.n} vertices")


def check_proper(hg: IntersectionHypergraph, col: Coloring) -> VerificationReport:
    _check_len(hg, col)
    for e in hg.hyperedges:
        if len({col.colors[v] for v in e}) == 1:
            return VerificationReport("proper", False, {"hyperedge": list(e), "color": col.colors[e[0]]})
    return VerificationReport("proper", True, {"palette": col.palette_size, "hyperedges": len(hg)})


def check_conflict_free(hg: IntersectionHypergraph, col: Coloring) -> VerificationReport:
    _check_len(hg, col)
    for e in hg.hyperedges:
        freq = Counter(col.colors[v] for v in e)
        if 1 not in freq.values():
            return VerificationReport("conflict_free", False,
                                      {"hyperedge": list(e), "colors": [col.colors[v] for v in e]})
    return VerificationReport("conflict_free", True, {"palette": col.palette_size, "hyperedges": len(hg)})


def check_planarity(g: Graph) -> VerificationReport:
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(g.edges)
    planar, cert = nx.check_planarity(G, counterexample=True)
    if planar:
        return VerificationReport("planar", True, {"n": g.n, "edges": len(g.edges)})
    return VerificationReport("planar", False,
                              {"kuratowski_subgraph": sorted(tuple(sorted(e)) for e in cert.edges())})


def brute_force_planar(g: Graph, limit: int = 2_000_000) -> bool:
    """Planarity by trying every rotation system (small graphs only).

    A connected graph is planar iff some choice of cyclic neighbour orders
    traces ``e - v + 2`` faces.
    """
    adj = [sorted(a) for a in g.adjacency()]
    seen = [False] * g.n
    for s in range(g.n):
        if seen[s]:
            continue
        comp = []
        stack = [s]
        seen[s] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
        if not _component_planar(comp, adj, limit):
            return False
    return True


def _component_planar(comp, adj, limit) -> bool:
    V = len(comp)
    E = sum(len(adj[v]) for v in comp) // 2
    if V >= 3 and E > 3 * V - 6:
        return False
    if E <= 2:
        return True
    target = E - V + 2
    # rotations: fix the first neighbour, permute the rest
    choices = []
    for v in comp:
        nb = adj[v]
        if len(nb) <= 2:
            choices.append([tuple(nb)])
        else:
            choices.append([(nb[0],) + p for p in permutations(nb[1:])])
    total = math.prod(len(c) for c in choices)
    if total > limit:
        raise ValueError(f"{total} rotation systems exceed the limit")
    for rot in product(*choices):
        succ = {}
        for v, order in zip(comp, rot):
            d = len(order)
            for i, u in enumerate(order):
                succ[(v, u)] = order[(i + 1) % d]
        faces = 0
        used = set()
        for v in comp:
            for u in adj[v]:
                if (v, u) in used:
                    continue
                faces += 1
                a, b = v, u
                while (a, b) not in used:
                    used.add((a, b))
                    a, b = b, succ[(b, a)]
        if faces == target:
            return True
    return False


# ---------------------------------------------------------------------------
# VC-dimension
# ---------------------------------------------------------------------------

def trace_family(hg: IntersectionHypergraph, include_small_traces: bool = True) -> set:
    fam = {frozenset(e) for e in hg.edges}
    if include_small_traces:
        fam |= set(hg.small_traces)
    return fam


def vc_dimension(hg: IntersectionHypergraph, include_small_traces: bool = True) -> int:
    """Largest shattered vertex set, grown level by level.

    A set can only be shattered if all its subsets are, so each level only
    extends shattered sets of the previous level.
    """
    if hg.n > 25:
        raise ValueError("vc_dimension is limited to 25 vertices")
    fam = trace_family(hg, include_small_traces)
    if not fam:
        return -1
    masks = np.array(sorted(sum(1 << v for v in t) for t in fam), dtype=np.int64)
    level = {0}  # the empty set is shattered by any non-empty family
    d = 0
    while True:
        nxt = set()
        for S in level:
            top = S.bit_length()
            for v in range(top, hg.n):
                T = S | (1 << v)
                if any(((T & ~(1 << u)) not in level) for u in range(hg.n) if T >> u & 1 and u != v):
                    continue
                if np.unique(masks & T).size == 1 << (d + 1):
                    nxt.add(T)
        if not nxt:
            result = d
            break
        level = nxt
        d += 1
    bound = math.log2(len(fam))
    if result > bound + 1e-12:
        raise AssertionError(f"VC-dimension {result} exceeds log2 of {len(fam)} traces")
    return result


def vc_dimension_trace_first(hg: IntersectionHypergraph, include_small_traces: bool = True,
                             max_size: Optional[int] = None) -> int:
    """Independent route: loop over traces, record the pattern cut on every small set."""
    fam = trace_family(hg, include_small_traces)
    if not fam:
        return -1
    if max_size is None:
        max_size = min(hg.n, int(math.log2(len(fam))))
    patterns: dict = {}
    sets = [frozenset(S) for k in range(1, max_size + 1) for S in combinations(range(hg.n), k)]
    for t in fam:
        for S in sets:
            patterns.setdefault(S, set()).add(S & t)
    best = 0
    for S, pats in patterns.items():
        if len(pats) == 2 ** len(S):
            best = max(best, len(S))
    return best


def shattered_witness(hg: IntersectionHypergraph, d: int, include_small_traces: bool = True):
    """Some shattered set of size ``d`` with a trace for each of its subsets."""
    fam = trace_family(hg, include_small_traces)
    for S in combinations(range(hg.n), d):
        S = frozenset(S)
        found = {}
        for t in sorted(fam, key=sorted):
            found.setdefault(S & t, t)
        if len(found) == 2 ** d:
            return sorted(S), {tuple(sorted(k)): sorted(v) for k, v in found.items()}
    return None


# ---------------------------------------------------------------------------
# counts
# ---------------------------------------------------------------------------

def check_count_bounds(stats: dict, census: Optional[dict] = None) -> VerificationReport:
    """Union boundary: ``v <= e <= v + n``; census ratios are reported only."""
    n = stats["n"]
    v = stats["union_vertex_count"]
    e = stats["union_edge_count"]
    ok = v <= e <= v + n
    details = {"n": n, "v": v, "e": e}
    if census:
        ratios = {}
        running = 0
        for k in sorted(census):
            running += census[k]
            ratios[k] = running / (k ** 3 * n) if n else 0.0
        details["census_ratios"] = ratios
    return VerificationReport("union_counts", ok, details)


def raster_face_counts(regions, step: float, bbox=None, margin: float = 1.0) -> Counter:
    """Faces per depth found by flood-filling a grid of sample points.

    Grid cells are joined to their 4-neighbours when both lie in exactly the
    same regions; each component is one face.  Exact for axis-parallel
    boundaries on a lattice at least two steps apart with no sample on a
    boundary.  Slanted edges can cut thin wedges off into extra components.
    """
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    from .geom import _float_contains

    if bbox is None:
        box = np.array([r.bbox() for r in regions])
        bbox = (box[:, 0].min(), box[:, 1].min(), box[:, 2].max(), box[:, 3].max())
    x0, y0 = math.floor(bbox[0] - margin), math.floor(bbox[1] - margin)
    x1, y1 = bbox[2] + margin, bbox[3] + margin
    xs = x0 + (np.arange(int(math.ceil((x1 - x0) / step))) + 0.5) * step
    ys = y0 + (np.arange(int(math.ceil((y1 - y0) / step))) + 0.5) * step
    X, Y = np.meshgrid(xs, ys)
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    sig = np.zeros(len(pts), dtype=object) if len(regions) > 62 else np.zeros(len(pts), dtype=np.int64)
    depth = np.zeros(len(pts), dtype=int)
    for i, r in enumerate(regions):
        inside = _float_contains(r, pts)
        sig[inside] += 1 << i
        depth += inside
    H, W = X.shape
    idx = np.arange(H * W).reshape(H, W)
    sg = sig.reshape(H, W)
    rows, cols = [], []
    same_h = sg[:, 1:] == sg[:, :-1]
    rows.append(idx[:, 1:][same_h])
    cols.append(idx[:, :-1][same_h])
    same_v = sg[1:, :] == sg[:-1, :]
    rows.append(idx[1:, :][same_v])
    cols.append(idx[:-1, :][same_v])
    r_ = np.concatenate(rows)
    c_ = np.concatenate(cols)
    adj = coo_matrix((np.ones(len(r_), dtype=np.int8), (r_, c_)), shape=(H * W, H * W))
    ncomp, labels = connected_components(adj, directed=False)
    comp_depth = np.zeros(ncomp, dtype=int)
    comp_depth[labels] = depth
    return Counter(int(d) for d in comp_depth)
