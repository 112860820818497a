"""Planar arrangement of polygonal boundaries.

All coordinates are scaled to integers by the lcm of their denominators, so
segment crossings become homogeneous integer triples and every orientation
test is exact.  Faces are recovered by half-edge traversal; each face gets an
interior representative point whose depth is computed by exact membership.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from math import gcd
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .geom import (ConvexPolygon, DegenerateGeometryError, Point2, PolygonRing,
                   contains_points, dyadic, polygonize)


@dataclass(frozen=True)
class Edge:
    """A maximal boundary piece between two crossing vertices.

    ``source``/``target`` are vertex indices, or ``None`` for a boundary
    component that meets no other boundary (one closed edge).
    """

    source: Optional[int]
    target: Optional[int]
    owner: int
    subedges: tuple = field(repr=False, default=())


@dataclass(frozen=True)
class Face:
    depth: int
    representative: Point2
    edges: tuple
    bounded: bool = True


@dataclass(frozen=True, eq=False)
class Arrangement:
    regions: tuple
    vertices: tuple
    edges: tuple
    faces: tuple
    union_edges: frozenset
    node_count: int
    subedge_count: int
    components: int

    @property
    def n(self) -> int:
        return len(self.regions)

    def euler_ok(self) -> bool:
        """v - e + f = 1 + c, counting each vertex-free closed edge as a vertex."""
        closed = sum(1 for e in self.edges if e.source is None)
        return len(self.vertices) + closed - len(self.edges) + len(self.faces) == 1 + self.components


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _as_ring(r) -> tuple:
    if isinstance(r, (ConvexPolygon, PolygonRing)):
        return r.vertices
    raise DegenerateGeometryError(
        f"region {r.id} of kind {r.kind} is not polygonal; polygonize it first")


def _signed_area2(pts) -> Fraction:
    s = 0
    m = len(pts)
    for i in range(m):
        a, b = pts[i], pts[(i + 1) % m]
        s += a[0] * b[1] - a[1] * b[0]
    return s


def _direction_cmp(u, v) -> int:
    """Counter-clockwise angular order of integer direction vectors from +x."""
    hu = 0 if (u[1] > 0 or (u[1] == 0 and u[0] > 0)) else 1
    hv = 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1
    if hu != hv:
        return hu - hv
    c = u[0] * v[1] - u[1] * v[0]
    return -1 if c > 0 else (1 if c < 0 else 0)


def _candidate_pairs(fseg: np.ndarray, owner: np.ndarray, chunk: int = 1024) -> np.ndarray:
    """Index pairs (i < j) of segments on different rings whose boxes overlap
    and whose float orientations do not clearly separate them."""
    n = len(fseg)
    x0 = np.minimum(fseg[:, 0], fseg[:, 2])
    x1 = np.maximum(fseg[:, 0], fseg[:, 2])
    y0 = np.minimum(fseg[:, 1], fseg[:, 3])
    y1 = np.maximum(fseg[:, 1], fseg[:, 3])
    scale = float(np.abs(fseg).max()) if n else 1.0
    slack = 1e-9 * (1.0 + scale)
    if n < 2:
        return np.zeros((0, 2), dtype=int)
    # sweep in x: after sorting by left end, segment i can only meet the
    # segments that start before its right end
    order = np.argsort(x0, kind="stable")
    xs = x0[order]
    hi = np.searchsorted(xs, x1[order] + slack, side="right")
    lo = np.arange(n) + 1
    cnt = np.maximum(hi - lo, 0)
    out = []
    starts = np.concatenate([[0], np.cumsum(cnt)])
    for s in range(0, n, chunk):
        e = min(n, s + chunk)
        tot = int(starts[e] - starts[s])
        if tot == 0:
            continue
        ii = np.repeat(np.arange(s, e), cnt[s:e])
        jj = np.arange(tot) - np.repeat(starts[s:e] - starts[s], cnt[s:e]) + np.repeat(lo[s:e], cnt[s:e])
        a, b = order[ii], order[jj]
        keep = ((y0[a] <= y1[b] + slack) & (y0[b] <= y1[a] + slack) & (owner[a] != owner[b]))
        a, b = a[keep], b[keep]
        out.append(np.stack([np.minimum(a, b), np.maximum(a, b)], axis=1))
    pairs = np.concatenate(out) if out else np.zeros((0, 2), dtype=int)
    if len(pairs) == 0:
        return pairs
    pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    a = fseg[pairs[:, 0]]
    b = fseg[pairs[:, 1]]

    def orient(p, q, r):
        v = (q[:, 0] - p[:, 0]) * (r[:, 1] - p[:, 1]) - (q[:, 1] - p[:, 1]) * (r[:, 0] - p[:, 0])
        mag = (np.abs(q[:, 0] - p[:, 0]) * np.abs(r[:, 1] - p[:, 1])
               + np.abs(q[:, 1] - p[:, 1]) * np.abs(r[:, 0] - p[:, 0]))
        return v, 1e-10 * mag + 1e-300

    A, B, C, D = a[:, 0:2], a[:, 2:4], b[:, 0:2], b[:, 2:4]
    o1, t1 = orient(C, D, A)
    o2, t2 = orient(C, D, B)
    o3, t3 = orient(A, B, C)
    o4, t4 = orient(A, B, D)
    apart = (((o1 > t1) & (o2 > t2)) | ((o1 < -t1) & (o2 < -t2))
             | ((o3 > t3) & (o4 > t4)) | ((o3 < -t3) & (o4 < -t4)))
    return pairs[~apart]


def _norm_key(X: int, Y: int, W: int) -> tuple:
    if W < 0:
        X, Y, W = -X, -Y, -W
    g = gcd(gcd(abs(X), abs(Y)), W)
    return (X // g, Y // g, W // g)


def build_arrangement(regions: Sequence, approx_vertices: Optional[int] = None) -> Arrangement:
    """Arrangement of the boundaries of polygonal regions.

    Disks and ears are rejected unless ``approx_vertices`` is given, in which
    case they are replaced by their polygonal approximations first.  Boundaries
    overlapping along a segment raise :class:`DegenerateGeometryError`.
    """
    if approx_vertices is not None:
        regions = [polygonize(r, approx_vertices) for r in regions]
    regions = tuple(regions)
    rings = [_as_ring(r) for r in regions]
    L = 1
    for ring in rings:
        for p in ring:
            L = _lcm(L, p.x.denominator)
            L = _lcm(L, p.y.denominator)

    # integer segments
    seg_a, seg_b, seg_owner = [], [], []
    for k, ring in enumerate(rings):
        pts = [(int(p.x * L), int(p.y * L)) for p in ring]
        if _signed_area2(pts) <= 0:
            raise DegenerateGeometryError(f"region {regions[k].id}: boundary must be counter-clockwise")
        m = len(pts)
        for i in range(m):
            seg_a.append(pts[i])
            seg_b.append(pts[(i + 1) % m])
            seg_owner.append(k)
    nseg = len(seg_a)
    fseg = np.array([(a[0], a[1], b[0], b[1]) for a, b in zip(seg_a, seg_b)], dtype=float).reshape(-1, 4)
    fseg /= L
    owner = np.array(seg_owner, dtype=int)

    # split parameters per segment: list of (t, key)
    splits = [[(Fraction(0), (a[0], a[1], 1)), (Fraction(1), (b[0], b[1], 1))]
              for a, b in zip(seg_a, seg_b)]
    for i, j in _candidate_pairs(fseg, owner):
        i, j = int(i), int(j)
        a, b, c, d = seg_a[i], seg_b[i], seg_a[j], seg_b[j]
        rx, ry = b[0] - a[0], b[1] - a[1]
        sx, sy = d[0] - c[0], d[1] - c[1]
        qx, qy = c[0] - a[0], c[1] - a[1]
        den = rx * sy - ry * sx
        if den == 0:
            if qx * ry - qy * rx != 0:
                continue
            rr = rx * rx + ry * ry
            t0 = qx * rx + qy * ry
            t1 = (d[0] - a[0]) * rx + (d[1] - a[1]) * ry
            lo, hi = max(0, min(t0, t1)), min(rr, max(t0, t1))
            if lo < hi:
                raise DegenerateGeometryError(
                    f"boundaries of regions {regions[seg_owner[i]].id} and "
                    f"{regions[seg_owner[j]].id} overlap along a segment")
            continue  # touching at a shared endpoint: already a node
        tn = qx * sy - qy * sx
        un = qx * ry - qy * rx
        if den < 0:
            den, tn, un = -den, -tn, -un
        if not (0 <= tn <= den and 0 <= un <= den):
            continue
        key = _norm_key(a[0] * den + tn * rx, a[1] * den + tn * ry, den)
        splits[i].append((Fraction(tn, den), key))
        splits[j].append((Fraction(un, den), key))

    # nodes and sub-edges
    node_of: dict = {}
    node_keys: list = []
    node_rings: list = []

    def node(key, ring):
        idx = node_of.get(key)
        if idx is None:
            idx = len(node_keys)
            node_of[key] = idx
            node_keys.append(key)
            node_rings.append(set())
        node_rings[idx].add(ring)
        return idx

    sub_u, sub_v, sub_seg = [], [], []
    ring_chain: list = [[] for _ in rings]  # sub-edge ids in ring order
    for s in range(nseg):
        pts = sorted(set(splits[s]))
        k = seg_owner[s]
        ids = []
        for t, key in pts:
            n_id = node(key, k)
            if not ids or ids[-1] != n_id:
                ids.append(n_id)
        for u, v in zip(ids, ids[1:]):
            ring_chain[k].append(len(sub_u))
            sub_u.append(u)
            sub_v.append(v)
            sub_seg.append(s)
    nsub = len(sub_u)
    nnode = len(node_keys)

    # half-edges: 2e is u->v along the ring, 2e+1 is its twin
    out_edges: list = [[] for _ in range(nnode)]
    for e in range(nsub):
        out_edges[sub_u[e]].append(2 * e)
        out_edges[sub_v[e]].append(2 * e + 1)

    def hdir(h):
        s = sub_seg[h >> 1]
        a, b = seg_a[s], seg_b[s]
        if h & 1:
            return (a[0] - b[0], a[1] - b[1])
        return (b[0] - a[0], b[1] - a[1])

    def head(h):
        return sub_v[h >> 1] if not h & 1 else sub_u[h >> 1]

    pos = {}
    for v in range(nnode):
        hs = out_edges[v]
        if len(hs) > 2:
            hs.sort(key=cmp_to_key(lambda p, q: _direction_cmp(hdir(p), hdir(q))))
            for a_, b_ in zip(hs, hs[1:]):
                if _direction_cmp(hdir(a_), hdir(b_)) == 0:
                    raise DegenerateGeometryError("overlapping boundary pieces at a vertex")
        elif len(hs) == 2 and _direction_cmp(hdir(hs[0]), hdir(hs[1])) > 0:
            hs.reverse()
        for i, h in enumerate(hs):
            pos[h] = i

    def nxt(h):
        t = h ^ 1
        v = head(h)
        hs = out_edges[v]
        return hs[pos[t] - 1]

    # node coordinates as floats (original units)
    nf = np.array([(k[0] / k[2], k[1] / k[2]) for k in node_keys], dtype=float).reshape(-1, 2) / L

    cycle_of = np.full(2 * nsub, -1, dtype=int)
    cycles = []
    for h0 in range(2 * nsub):
        if cycle_of[h0] >= 0:
            continue
        cyc = []
        h = h0
        while cycle_of[h] < 0:
            cycle_of[h] = len(cycles)
            cyc.append(h)
            h = nxt(h)
        cycles.append(cyc)

    def tail(h):
        return sub_u[h >> 1] if not h & 1 else sub_v[h >> 1]

    def cycle_sign(cyc) -> int:
        idx = [tail(h) for h in cyc]
        P = nf[idx]
        Q = np.roll(P, -1, axis=0)
        area = float((P[:, 0] * Q[:, 1] - P[:, 1] * Q[:, 0]).sum())
        mag = float(np.abs(P[:, 0] * Q[:, 1]).sum() + np.abs(P[:, 1] * Q[:, 0]).sum())
        if abs(area) > 1e-9 * mag:
            return 1 if area > 0 else -1
        pts = [(Fraction(node_keys[i][0], node_keys[i][2]), Fraction(node_keys[i][1], node_keys[i][2]))
               for i in idx]
        a = _signed_area2(pts)
        return (a > 0) - (a < 0)

    signs = [cycle_sign(c) for c in cycles]

    # representative point left of the longest half-edge of each cycle
    sub_f = np.concatenate([nf[sub_u], nf[sub_v]], axis=1) if nsub else np.zeros((0, 4))
    sub_seg_arr = np.asarray(sub_seg, dtype=int)
    mids = (sub_f[:, 0:2] + sub_f[:, 2:4]) / 2 if nsub else np.zeros((1, 2))
    half_max = float(np.hypot(sub_f[:, 2] - sub_f[:, 0], sub_f[:, 3] - sub_f[:, 1]).max()) / 2 if nsub else 0.0
    tree = cKDTree(mids)
    reps = []
    for cyc in cycles:
        best, blen = None, -1.0
        for h in cyc:
            p, q = nf[tail(h)], nf[head(h)]
            ln = float(np.hypot(*(q - p)))
            if ln > blen:
                best, blen = h, ln
        p, q = nf[tail(best)], nf[head(best)]
        m = (p + q) / 2
        d = (q - p) / blen
        normal = np.array([-d[1], d[0]])
        # only sub-edges that could come within blen / 2 of m matter
        near = np.asarray(tree.query_ball_point(m, blen / 2 + half_max), dtype=int)
        near = near[sub_seg_arr[near] != sub_seg[best >> 1]]
        clearance = _min_seg_dist(m, sub_f[near]) if len(near) else math.inf
        delta = 0.25 * min(clearance, blen / 2)
        if not delta > 1e-10 * (1 + float(np.abs(m).max())):
            raise DegenerateGeometryError("face too thin to place a representative point")
        r = m + delta * normal
        reps.append(Point2(dyadic(float(r[0])), dyadic(float(r[1]))))

    depth_arr = np.zeros(len(cycles), dtype=int)
    if cycles:
        fr = np.array([p.as_float() for p in reps])
        for reg in regions:
            depth_arr += contains_points(reg, reps, fr)
    depths = [int(x) for x in depth_arr]

    # components of the boundary graph
    parent = list(range(nnode))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in range(nsub):
        ra, rb = find(sub_u[e]), find(sub_v[e])
        if ra != rb:
            parent[ra] = rb
    ncomp = len({find(v) for v in range(nnode)})

    # arrangement vertices: nodes on two or more boundaries
    crossing = [len(s) >= 2 for s in node_rings]
    vidx = {}
    verts = []
    for i, c in enumerate(crossing):
        if c:
            vidx[i] = len(verts)
            k = node_keys[i]
            verts.append(Point2(Fraction(k[0], k[2] * L), Fraction(k[1], k[2] * L)))

    edges = []
    edge_of_sub = np.full(nsub, -1, dtype=int)
    for k, chain in enumerate(ring_chain):
        starts = [i for i, e in enumerate(chain) if crossing[sub_u[e]]]
        if not starts:
            edge_of_sub[chain] = len(edges)
            edges.append(Edge(None, None, regions[k].id, tuple(chain)))
            continue
        m = len(chain)
        s0 = starts[0]
        rot = chain[s0:] + chain[:s0]
        cur = []
        for e in rot:
            if cur and crossing[sub_u[e]]:
                edge_of_sub[cur] = len(edges)
                edges.append(Edge(vidx[sub_u[cur[0]]], vidx[sub_v[cur[-1]]], regions[k].id, tuple(cur)))
                cur = []
            cur.append(e)
        edge_of_sub[cur] = len(edges)
        edges.append(Edge(vidx[sub_u[cur[0]]], vidx[sub_v[cur[-1]]], regions[k].id, tuple(cur)))

    union_edges = frozenset(
        i for i, e in enumerate(edges)
        if depths[cycle_of[2 * e.subedges[0] + 1]] == 0 or depths[cycle_of[2 * e.subedges[0]]] == 0)

    # faces: one per positive cycle plus the unbounded face; hole cycles are
    # attached to the face found by casting a ray to the right of them
    face_of_cycle = {}
    pos_cycles = [i for i, s in enumerate(signs) if s > 0]
    for f, c in enumerate(pos_cycles):
        face_of_cycle[c] = f
    outer = len(pos_cycles)
    hole_target = {}
    for c, s in enumerate(signs):
        if s <= 0:
            hole_target[c] = _ray_hit_cycle(reps[c], sub_f, cycle_of)

    def resolve(c, seen=()):
        if c in face_of_cycle:
            return face_of_cycle[c]
        t = hole_target.get(c)
        if t is None or t in seen:
            return outer
        return resolve(t, seen + (c,))

    face_cycles = [[c] for c in pos_cycles] + [[]]
    for c in hole_target:
        face_cycles[resolve(c)].append(c)

    def cycle_edges(cyc_ids):
        out = set()
        for c in cyc_ids:
            for h in cycles[c]:
                out.add(int(edge_of_sub[h >> 1]))
        return tuple(sorted(out))

    faces = []
    for f, c in enumerate(pos_cycles):
        faces.append(Face(depths[c], reps[c], cycle_edges(face_cycles[f])))
    faces.append(Face(0, _outer_point(nf), cycle_edges(face_cycles[outer]), bounded=False))

    arr = Arrangement(regions, tuple(verts), tuple(edges), tuple(faces), union_edges,
                      nnode, nsub, ncomp)
    arr.__dict__["_cycles"] = (cycles, signs, face_cycles, nf, sub_u, sub_v)
    return arr


def _min_seg_dist(p: np.ndarray, segs: np.ndarray) -> float:
    a = segs[:, 0:2]
    b = segs[:, 2:4]
    d = b - a
    L = (d * d).sum(axis=1)
    L = np.where(L == 0, 1.0, L)
    t = np.clip(((p - a) * d).sum(axis=1) / L, 0.0, 1.0)
    q = a + t[:, None] * d
    return float(np.hypot(q[:, 0] - p[0], q[:, 1] - p[1]).min())


def _ray_hit_cycle(p: Point2, sub_f: np.ndarray, cycle_of: np.ndarray) -> Optional[int]:
    """Cycle on the near side of the first sub-edge hit by a ray to +x."""
    if len(sub_f) == 0:
        return None
    px, py = p.as_float()
    x0, y0, x1, y1 = sub_f[:, 0], sub_f[:, 1], sub_f[:, 2], sub_f[:, 3]
    straddle = (y0 > py) != (y1 > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xs = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
    hit = straddle & (xs > px)
    if not hit.any():
        return None
    e = int(np.argmin(np.where(hit, xs, np.inf)))
    # the half-edge pointing up has the ray's origin side on its left
    h = 2 * e if y1[e] > y0[e] else 2 * e + 1
    return int(cycle_of[h])


def _outer_point(nf: np.ndarray) -> Point2:
    if len(nf) == 0:
        return Point2(0, 0)
    return Point2(dyadic(float(nf[:, 0].max()) + 1.0), dyadic(float(nf[:, 1].max()) + 1.0))


def union_complexity(arr: Arrangement) -> tuple:
    """``(edge_count, vertex_count)`` of the boundary of the union."""
    vs = set()
    for i in arr.union_edges:
        e = arr.edges[i]
        if e.source is not None:
            vs.add(e.source)
            vs.add(e.target)
    return len(arr.union_edges), len(vs)


def count_k_deep_faces(arr: Arrangement, k: int) -> int:
    """Faces of depth exactly ``k``; for ``k = 0`` the unbounded face is included."""
    return sum(1 for f in arr.faces if f.depth == k)


def face_representatives(arr: Arrangement, min_depth: int) -> list:
    return [f.representative for f in arr.faces if f.depth >= min_depth]


def face_polygons(arr: Arrangement) -> list:
    """Per face: (depth, list of float rings) for rendering with even-odd fill."""
    cycles, signs, face_cycles, nf, sub_u, sub_v = arr.__dict__["_cycles"]
    out = []
    for f, cyc_ids in enumerate(face_cycles):
        rings = []
        for c in cyc_ids:
            pts = [nf[sub_u[h >> 1]] if not h & 1 else nf[sub_v[h >> 1]] for h in cycles[c]]
            rings.append([tuple(map(float, p)) for p in pts])
        out.append((arr.faces[f].depth, rings))
    return out


def stats_row(arr: Arrangement, kmax: int = 5) -> dict:
    ue, uv = union_complexity(arr)
    row = {"n": arr.n, "vertices": len(arr.vertices), "edges": len(arr.edges),
           "faces": len(arr.faces), "union_edge_count": ue, "union_vertex_count": uv}
    for k in range(1, kmax + 1):
        row[f"k{k}"] = count_k_deep_faces(arr, k)
    return row


def vertex_depths(arr: Arrangement) -> list:
    """Number of regions containing each vertex, not counting the boundaries through it."""
    if not arr.vertices:
        return []
    counts = np.zeros(len(arr.vertices), dtype=int)
    fv = np.array([v.as_float() for v in arr.vertices])
    for reg in arr.regions:
        counts += contains_points(reg, list(arr.vertices), fv)
    on = [set() for _ in arr.vertices]
    for e in arr.edges:
        if e.source is not None:
            on[e.source].add(e.owner)
            on[e.target].add(e.owner)
    return [int(c) - len(o) for c, o in zip(counts, on)]


def clarkson_shor_report(regions: Sequence, k: int, trials: int = 8, seed: int = 0,
                         approx_vertices: Optional[int] = None) -> dict:
    """Compare the number of k-deep vertices with a half-sampling bound.

    A vertex covered by exactly ``k`` other regions is a vertex of the union
    of a random half-sample with probability ``2**-(k + 2)``, so
    ``2**(k + 2)`` times the mean sampled union vertex count bounds it in
    expectation.  Illustrative only.
    """
    rng = random.Random(seed)
    regions = list(regions)
    arr = build_arrangement(regions, approx_vertices)
    deep = sum(1 for d in vertex_depths(arr) if d == k)
    samples = []
    for _ in range(trials):
        sub = [r for r in regions if rng.random() < 0.5]
        samples.append(union_complexity(build_arrangement(sub, approx_vertices))[1] if sub else 0)
    mean = sum(samples) / len(samples)
    return {"n": len(regions), "k": k, "k_deep_vertices": deep,
            "mean_sample_union_vertices": mean, "bound": mean * 2 ** (k + 2)}
