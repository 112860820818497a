"""Intersection hypergraphs, Delaunay graphs, point-closure and supports."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np

from .arrangement import build_arrangement, face_representatives
from .geom import (Point2, PointMass, Scene,
                   contains_points, dyadic, intersection_matrix, point_in_region,
                   regions_intersect, triple_intersection_empty)

Witness = Union[int, Point2]


@dataclass
class IntersectionHypergraph:
    """Hyperedges of size at least two over vertices ``0..n-1``.

    ``edges`` maps each sorted vertex tuple to its first witness: the id of a
    region of F, or a point.  ``small_traces`` collects the realized traces of
    size at most one (empty set and singletons), which the hypergraph itself
    drops but which matter for shattering.
    """

    n: int
    edges: dict = field(default_factory=dict)
    small_traces: set = field(default_factory=set)

    @property
    def hyperedges(self) -> list:
        return sorted(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, e) -> bool:
        return tuple(sorted(e)) in self.edges

    def add(self, members: Iterable[int], witness: Witness) -> bool:
        key = tuple(sorted(set(members)))
        if len(key) < 2:
            self.small_traces.add(frozenset(key))
            return False
        if key in self.edges:
            return False
        self.edges[key] = witness
        return True

    def copy(self) -> IntersectionHypergraph:
        return IntersectionHypergraph(self.n, dict(self.edges), set(self.small_traces))

    def induced(self, keep: Iterable[int]) -> IntersectionHypergraph:
        """Traces on ``keep`` (size at least two), relabelled to ``0..len(keep)-1``."""
        keep = list(keep)
        index = {v: i for i, v in enumerate(keep)}
        out = IntersectionHypergraph(len(keep))
        for e, w in self.edges.items():
            out.add([index[v] for v in e if v in index], w)
        return out

    def to_json(self) -> dict:
        hs = self.hyperedges
        return {"n": self.n, "hyperedges": [list(e) for e in hs],
                "witnesses": [_witness_json(self.edges[e]) for e in hs],
                "small_traces": sorted(sorted(t) for t in self.small_traces)}

    @classmethod
    def from_json(cls, data: dict) -> IntersectionHypergraph:
        hg = cls(int(data["n"]))
        ws = data.get("witnesses") or [None] * len(data["hyperedges"])
        for e, w in zip(data["hyperedges"], ws):
            hg.add(e, _witness_from_json(w))
        hg.small_traces.update(frozenset(t) for t in data.get("small_traces", ()))
        return hg


def _witness_json(w):
    if isinstance(w, Point2):
        return {"point": w.to_json()}
    return {"region": w}


def _witness_from_json(w):
    if w is None:
        return None
    if "point" in w:
        return Point2.from_json(w["point"])
    return int(w["region"])


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset
    approximate: bool = False

    def __post_init__(self):
        es = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError("self-loop")
            es.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(es))

    def adjacency(self) -> list:
        adj = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


def build_intersection_hypergraph(scene: Scene) -> IntersectionHypergraph:
    if scene.all_points:
        raise ValueError("F is all points; use point_closure on an empty hypergraph")
    hg = IntersectionHypergraph(len(scene.B))
    M = intersection_matrix(scene.B, scene.F)
    for j, F in enumerate(scene.F):
        hg.add(np.nonzero(M[:, j])[0].tolist(), F.id)
    return hg


def _membership(B, pts: list) -> np.ndarray:
    """``P[p, i]`` = point ``p`` lies in ``B[i]`` (exact)."""
    P = np.zeros((len(pts), len(B)), dtype=bool)
    if not pts:
        return P
    fp = np.array([p.as_float() for p in pts])
    for i, b in enumerate(B):
        P[:, i] = contains_points(b, pts, fp)
    return P


def sample_points(scene: Scene, sampling="arrangement", approx_vertices: int = 64) -> list:
    """Candidate points for closure: face representatives or a grid."""
    B = [b for b in scene.B if not isinstance(b, PointMass)]
    if not B:
        return []
    if sampling == "arrangement":
        arr = build_arrangement(B, approx_vertices)
        return face_representatives(arr, 1)
    kind, step = sampling
    if kind != "grid":
        raise ValueError(f"unknown sampling mode {sampling!r}")
    box = np.array([b.bbox() for b in B])
    x0, y0 = box[:, 0].min(), box[:, 1].min()
    x1, y1 = box[:, 2].max(), box[:, 3].max()
    step = float(step)
    xs = np.arange(x0 + step / 2, x1, step)
    ys = np.arange(y0 + step / 2, y1, step)
    return [Point2(dyadic(x), dyadic(y)) for y in ys for x in xs]


def point_closure(scene: Scene, hg: IntersectionHypergraph, sampling="arrangement",
                  approx_vertices: int = 64) -> IntersectionHypergraph:
    """Add ``H_p`` for sampled points ``p`` that lie in some member of F.

    Points come from the face representatives of the arrangement of the
    (polygon-approximated) members of B, or from a grid ``("grid", step)``.
    Membership in B is tested exactly on the original regions.
    """
    out = hg.copy()
    pts = sample_points(scene, sampling, approx_vertices)
    if scene.all_points:
        out.small_traces.add(frozenset())
        for i, b in enumerate(scene.B):
            if isinstance(b, PointMass) and not any(
                    j != i and point_in_region(b.center, o) for j, o in enumerate(scene.B)):
                out.small_traces.add(frozenset([i]))
    if not pts:
        return out
    P = _membership(scene.B, pts)
    if scene.all_points:
        inF = np.ones(len(pts), dtype=bool)
    else:
        inF = np.zeros(len(pts), dtype=bool)
        fp = np.array([p.as_float() for p in pts])
        for F in scene.F:
            inF |= contains_points(F, pts, fp)
    for k in np.nonzero(inF)[0]:
        members = np.nonzero(P[k])[0].tolist()
        if scene.all_points or len(members) >= 2:
            out.add(members, pts[k])
    return out


def delaunay_graph(hg: IntersectionHypergraph) -> Graph:
    return Graph(hg.n, frozenset(e for e in hg.edges if len(e) == 2))


def restricted_delaunay_graph(scene: Scene, hg: Optional[IntersectionHypergraph] = None,
                              approx_vertices: int = 256) -> Graph:
    """Pairs ``{i, j}`` having a member of F that meets exactly ``B[i]`` and
    ``B[j]`` while missing ``B[i] ∩ B[j]``."""
    n = len(scene.B)
    if scene.all_points:
        # a point meeting two members lies in their intersection
        return Graph(n, frozenset())
    M = intersection_matrix(scene.B, scene.F)
    edges = set()
    approximate = False
    for j, F in enumerate(scene.F):
        members = np.nonzero(M[:, j])[0]
        if len(members) != 2:
            continue
        a, b = int(members[0]), int(members[1])
        if (a, b) in edges:
            continue
        empty, approx = triple_intersection_empty(F, scene.B[a], scene.B[b], approx_vertices)
        approximate |= approx
        if empty:
            edges.add((a, b))
    return Graph(n, frozenset(edges), approximate)


def supports(candidate, target: IntersectionHypergraph) -> bool:
    """Every hyperedge of ``target`` contains an edge of ``candidate``."""
    return first_unsupported(candidate, target) is None


def first_unsupported(candidate, target: IntersectionHypergraph):
    if candidate.n != target.n:
        raise ValueError("vertex counts differ")
    cand = candidate.edges if isinstance(candidate, Graph) else list(candidate.edges)
    by_min: dict = {}
    for e in cand:
        by_min.setdefault(min(e), []).append(frozenset(e))
    for h in target.hyperedges:
        hs = set(h)
        if not any(e <= hs for v in h for e in by_min.get(v, ())):
            return h
    return None


def hyperedge_census(hg: IntersectionHypergraph, k_max: int) -> dict:
    counts = {k: 0 for k in range(2, k_max + 1)}
    for e in hg.edges:
        if len(e) <= k_max:
            counts[len(e)] += 1
    return counts


def verify_witnesses(scene: Scene, hg: IntersectionHypergraph):
    """Return the first hyperedge whose witness does not reproduce it, else None."""
    F_by_id = {} if scene.all_points else {f.id: f for f in scene.F}
    for e, w in sorted(hg.edges.items()):
        if isinstance(w, Point2):
            members = tuple(i for i, b in enumerate(scene.B) if point_in_region(w, b))
        else:
            F = F_by_id[w]
            members = tuple(i for i, b in enumerate(scene.B) if regions_intersect(b, F))
        if members != e:
            return e
    return None
