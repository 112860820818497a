"""Geometric primitives, region kinds and exact predicates.

Coordinates are :class:`fractions.Fraction`.  Every predicate that decides
membership or intersection is exact; hot paths first evaluate a float
version with a safety margin and only fall back to rational arithmetic when
the float answer is too close to call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import ClassVar, Iterable, NamedTuple, Sequence, Union

import numpy as np
from scipy.spatial import cKDTree

RationalLike = Union[int, str, Fraction]

#: default number of boundary samples used by approximate crossing counts
DEFAULT_SAMPLES = 512

# Relative tolerance for trusting a float evaluation.  Inputs are converted
# from rationals with relative error 2**-53, so 1e-9 leaves a wide margin.
_FLOAT_TOL = 1e-9


class DegenerateGeometryError(ValueError):
    """Raised when boundaries coincide or overlap along a segment."""


def rational(v: RationalLike | float) -> Fraction:
    """Coerce ``v`` to a Fraction.  Strings may be ``"num/den"`` or decimals."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(v, (int, str)):
        return Fraction(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError(f"non-finite coordinate {v!r}")
        return Fraction(v)
    raise TypeError(f"cannot interpret {v!r} as a rational")


def rational_json(q: Fraction) -> int | str:
    """JSON form of a rational: plain int when integral, else ``"num/den"``."""
    q = rational(q)
    if q.denominator == 1:
        return q.numerator
    return f"{q.numerator}/{q.denominator}"


def dyadic(x: float, bits: int = 40) -> Fraction:
    """Round a float to the nearest multiple of ``2**-bits``."""
    return Fraction(round(x * (1 << bits)), 1 << bits)


@dataclass(frozen=True)
class Point2:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", rational(self.x))
        object.__setattr__(self, "y", rational(self.y))

    def __iter__(self):
        yield self.x
        yield self.y

    def __getitem__(self, i: int) -> Fraction:
        return (self.x, self.y)[i]

    def __add__(self, other: Point2) -> Point2:
        return Point2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Point2) -> Point2:
        return Point2(self.x - other.x, self.y - other.y)

    def as_float(self) -> tuple[float, float]:
        return float(self.x), float(self.y)

    def to_json(self) -> list:
        return [rational_json(self.x), rational_json(self.y)]

    @classmethod
    def from_json(cls, data) -> Point2:
        if isinstance(data, dict):
            return cls(rational(data["x"]), rational(data["y"]))
        x, y = data
        return cls(rational(x), rational(y))


def _pt(p) -> Point2:
    return p if isinstance(p, Point2) else Point2(*p)


# ---------------------------------------------------------------------------
# exact vector helpers on (x, y) pairs
# ---------------------------------------------------------------------------

def cross(o, a, b):
    """Twice the signed area of triangle ``o, a, b`` (positive when ccw)."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def dist2(a, b):
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return dx * dx + dy * dy


def point_segment_dist2(p, a, b):
    """Squared distance from ``p`` to the closed segment ``ab`` (exact)."""
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    den = dx * dx + dy * dy
    if den == 0:
        return dist2(p, a)
    t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / den
    if t <= 0:
        return dist2(p, a)
    if t >= 1:
        return dist2(p, b)
    qx = a[0] + t * dx
    qy = a[1] + t * dy
    return (p[0] - qx) ** 2 + (p[1] - qy) ** 2


def _on_segment(p, a, b) -> bool:
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def segments_intersect(a, b, c, d) -> bool:
    """Closed segments ``ab`` and ``cd`` share a point."""
    d1 = cross(c, d, a)
    d2 = cross(c, d, b)
    d3 = cross(a, b, c)
    d4 = cross(a, b, d)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and \
            ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    if d1 == 0 and _on_segment(a, c, d):
        return True
    if d2 == 0 and _on_segment(b, c, d):
        return True
    if d3 == 0 and _on_segment(c, a, b):
        return True
    if d4 == 0 and _on_segment(d, a, b):
        return True
    return False


def segment_segment_dist2(a, b, c, d):
    if segments_intersect(a, b, c, d):
        return Fraction(0)
    return min(point_segment_dist2(a, c, d), point_segment_dist2(b, c, d),
               point_segment_dist2(c, a, b), point_segment_dist2(d, a, b))


def _in_convex(p, verts) -> bool:
    m = len(verts)
    for i in range(m):
        if cross(verts[i], verts[(i + 1) % m], p) < 0:
            return False
    return True


def point_polygon_dist2(p, verts):
    """Squared distance from ``p`` to a closed convex polygon (0 inside)."""
    if _in_convex(p, verts):
        return Fraction(0)
    m = len(verts)
    return min(point_segment_dist2(p, verts[i], verts[(i + 1) % m]) for i in range(m))


def segment_polygon_dist2(a, b, verts):
    """Squared distance between a closed segment and a closed convex polygon."""
    if _in_convex(a, verts) or _in_convex(b, verts):
        return Fraction(0)
    m = len(verts)
    best = None
    for i in range(m):
        u, v = verts[i], verts[(i + 1) % m]
        d = segment_segment_dist2(a, b, u, v)
        if d == 0:
            return d
        if best is None or d < best:
            best = d
    return best


# ---------------------------------------------------------------------------
# region kinds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Region:
    """Base class of the closed regions used for both families of a scene."""

    id: int
    kind: ClassVar[str] = "region"

    def bbox(self) -> tuple[float, float, float, float]:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class PointMass(Region):
    center: Point2 = None
    kind: ClassVar[str] = "point"

    def __post_init__(self):
        object.__setattr__(self, "center", _pt(self.center))

    @cached_property
    def _fc(self):
        return self.center.as_float()

    def bbox(self):
        x, y = self._fc
        return (x, y, x, y)

    def to_json(self):
        return {"id": self.id, "kind": self.kind, "center": self.center.to_json()}


@dataclass(frozen=True)
class Disk(Region):
    center: Point2 = None
    radius: Fraction = None
    kind: ClassVar[str] = "disk"

    def __post_init__(self):
        object.__setattr__(self, "center", _pt(self.center))
        object.__setattr__(self, "radius", rational(self.radius))
        if self.radius <= 0:
            raise ValueError(f"disk {self.id}: radius must be positive")

    @cached_property
    def _fc(self):
        return self.center.as_float()

    @cached_property
    def _fr(self):
        return float(self.radius)

    def bbox(self):
        x, y = self._fc
        r = self._fr
        return (x - r, y - r, x + r, y + r)

    def to_json(self):
        return {"id": self.id, "kind": self.kind, "center": self.center.to_json(),
                "radius": rational_json(self.radius)}


def _check_strictly_convex(verts: Sequence[Point2]) -> None:
    m = len(verts)
    if m < 3:
        raise ValueError("a convex polygon needs at least 3 vertices")
    for i in range(m):
        if cross(verts[i - 1], verts[i], verts[(i + 1) % m]) <= 0:
            raise ValueError(f"polygon is not strictly convex and ccw at vertex {i}")
    # all-left-turn polygons can still wind more than once (pentagram)
    for axis in (0, 1):
        signs = [(verts[(i + 1) % m][axis] > verts[i][axis]) - (verts[(i + 1) % m][axis] < verts[i][axis])
                 for i in range(m)]
        signs = [s for s in signs if s]
        changes = sum(1 for i in range(len(signs)) if signs[i] != signs[i - 1])
        if changes > 2:
            raise ValueError("polygon winds more than once")


@dataclass(frozen=True)
class ConvexPolygon(Region):
    vertices: tuple = ()
    kind: ClassVar[str] = "polygon"

    def __post_init__(self):
        verts = tuple(_pt(v) for v in self.vertices)
        _check_strictly_convex(verts)
        object.__setattr__(self, "vertices", verts)

    @cached_property
    def _fv(self) -> np.ndarray:
        return np.array([v.as_float() for v in self.vertices], dtype=float)

    def bbox(self):
        v = self._fv
        return (v[:, 0].min(), v[:, 1].min(), v[:, 0].max(), v[:, 1].max())

    def edges(self):
        m = len(self.vertices)
        for i in range(m):
            yield self.vertices[i], self.vertices[(i + 1) % m]

    def to_json(self):
        return {"id": self.id, "kind": self.kind,
                "vertices": [v.to_json() for v in self.vertices]}


@dataclass(frozen=True)
class EarRegion(Region):
    """Union of a disk about ``center`` and two capsules towards the anchors."""

    center: Point2 = None
    anchor_i: Point2 = None
    anchor_j: Point2 = None
    disk_radius: Fraction = None
    capsule_radius: Fraction = None
    kind: ClassVar[str] = "ear"

    def __post_init__(self):
        for name in ("center", "anchor_i", "anchor_j"):
            object.__setattr__(self, name, _pt(getattr(self, name)))
        object.__setattr__(self, "disk_radius", rational(self.disk_radius))
        object.__setattr__(self, "capsule_radius", rational(self.capsule_radius))
        if not self.disk_radius > self.capsule_radius >= 0:
            raise ValueError(f"ear {self.id}: need disk_radius > capsule_radius >= 0")

    def capsules(self):
        return ((self.center, self.anchor_i), (self.center, self.anchor_j))

    @cached_property
    def _float(self):
        o = self.center.as_float()
        return (o, self.anchor_i.as_float(), self.anchor_j.as_float(),
                float(self.disk_radius), float(self.capsule_radius))

    def bbox(self):
        o, a, b, R, c = self._float
        xs = [o[0] - R, o[0] + R, a[0] - c, a[0] + c, b[0] - c, b[0] + c]
        ys = [o[1] - R, o[1] + R, a[1] - c, a[1] + c, b[1] - c, b[1] + c]
        return (min(xs), min(ys), max(xs), max(ys))

    def to_json(self):
        return {"id": self.id, "kind": self.kind, "center": self.center.to_json(),
                "anchor_i": self.anchor_i.to_json(), "anchor_j": self.anchor_j.to_json(),
                "disk_radius": rational_json(self.disk_radius),
                "capsule_radius": rational_json(self.capsule_radius)}


@dataclass(frozen=True)
class PolygonRing:
    """A simple (possibly non-convex) ccw polygon approximating a region.

    Not a scene region kind: rings only feed the arrangement module.
    """

    id: int
    vertices: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(_pt(v) for v in self.vertices))
        if len(self.vertices) < 3:
            raise ValueError("a ring needs at least 3 vertices")

    @cached_property
    def _fv(self) -> np.ndarray:
        return np.array([v.as_float() for v in self.vertices], dtype=float)

    def bbox(self):
        v = self._fv
        return (v[:, 0].min(), v[:, 1].min(), v[:, 0].max(), v[:, 1].max())

    @cached_property
    def _segment_index(self):
        """KD-tree on short pieces of the edges, the piece owners and half the piece length."""
        v = self._fv
        w = np.roll(v, -1, axis=0)
        lengths = np.hypot(*(w - v).T)
        piece = max(float(np.median(lengths)), 1e-12)
        counts = np.maximum(1, np.ceil(lengths / piece).astype(int))
        owner = np.repeat(np.arange(len(v)), counts)
        k = np.arange(len(owner)) - np.repeat(np.cumsum(counts) - counts, counts)
        t = (k + 0.5) / counts[owner]
        mids = v[owner] + t[:, None] * (w - v)[owner]
        half = float((lengths / counts).max()) / 2
        return cKDTree(mids), owner, half

    def near_boundary(self, fpts: np.ndarray, tol: float) -> np.ndarray:
        """Float distance to the ring for points that may lie within ``tol``, else inf."""
        tree, owner, half = self._segment_index
        v = self._fv
        w = np.roll(v, -1, axis=0)
        out = np.full(len(fpts), np.inf)
        hits = tree.query_ball_point(fpts, tol + half)
        sizes = np.fromiter((len(h) for h in hits), dtype=int, count=len(hits))
        if not sizes.any():
            return out
        pi = np.repeat(np.arange(len(fpts)), sizes)
        seg = owner[np.concatenate([h for h in hits if h])]
        a, b = v[seg], w[seg]
        d = b - a
        L = (d * d).sum(axis=1)
        t = np.clip(((fpts[pi] - a) * d).sum(axis=1) / np.where(L == 0, 1.0, L), 0.0, 1.0)
        q = a + t[:, None] * d
        np.minimum.at(out, pi, np.hypot(*(fpts[pi] - q).T))
        return out

    def contains(self, p) -> bool:
        """Closed membership by exact crossing number."""
        verts = self.vertices
        m = len(verts)
        inside = False
        for i in range(m):
            a, b = verts[i], verts[(i + 1) % m]
            if cross(a, b, p) == 0 and _on_segment(p, a, b):
                return True
            if (a.y > p.y) != (b.y > p.y):
                xint = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
                if p.x < xint:
                    inside = not inside
        return inside


REGION_KINDS = {cls.kind: cls for cls in (PointMass, Disk, ConvexPolygon, EarRegion)}


def region_from_json(data: dict) -> Region:
    kind = data["kind"]
    rid = int(data["id"])
    if kind == "point":
        return PointMass(rid, Point2.from_json(data["center"]))
    if kind == "disk":
        return Disk(rid, Point2.from_json(data["center"]), rational(data["radius"]))
    if kind == "polygon":
        return ConvexPolygon(rid, tuple(Point2.from_json(v) for v in data["vertices"]))
    if kind == "ear":
        return EarRegion(rid, Point2.from_json(data["center"]),
                         Point2.from_json(data["anchor_i"]), Point2.from_json(data["anchor_j"]),
                         rational(data["disk_radius"]), rational(data["capsule_radius"]))
    raise ValueError(f"unknown region kind {kind!r}")


ALL_POINTS = "all_points"


@dataclass(frozen=True)
class Scene:
    """Family ``B`` to be colored and family ``F`` (explicit or all points)."""

    B: tuple
    F: Union[tuple, str] = ALL_POINTS

    def __post_init__(self):
        object.__setattr__(self, "B", tuple(self.B))
        if self.F != ALL_POINTS:
            object.__setattr__(self, "F", tuple(self.F))
        ids = [r.id for r in self.B] + ([] if self.all_points else [r.id for r in self.F])
        if len(ids) != len(set(ids)):
            raise ValueError("region ids must be unique within a scene")

    @property
    def all_points(self) -> bool:
        return isinstance(self.F, str)

    def subscene(self, indices: Iterable[int]) -> Scene:
        return Scene(tuple(self.B[i] for i in indices), self.F)

    def to_json(self) -> dict:
        return {"B": [r.to_json() for r in self.B],
                "F": ALL_POINTS if self.all_points else [r.to_json() for r in self.F]}

    @classmethod
    def from_json(cls, data: dict) -> Scene:
        F = data.get("F", ALL_POINTS)
        if F != ALL_POINTS:
            F = tuple(region_from_json(r) for r in F)
        return cls(tuple(region_from_json(r) for r in data["B"]), F)


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------

def point_in_region(p, r: Region) -> bool:
    """Closed membership of ``p`` in ``r``; exact for every kind."""
    p = _pt(p)
    if isinstance(r, PointMass):
        return p == r.center
    if isinstance(r, Disk):
        return dist2(p, r.center) <= r.radius * r.radius
    if isinstance(r, ConvexPolygon):
        return _in_convex(p, r.vertices)
    if isinstance(r, EarRegion):
        if dist2(p, r.center) <= r.disk_radius ** 2:
            return True
        c2 = r.capsule_radius ** 2
        return any(point_segment_dist2(p, a, b) <= c2 for a, b in r.capsules())
    if isinstance(r, PolygonRing):
        return r.contains(p)
    raise TypeError(f"unsupported region {r!r}")


def _float_poly_dist(p, v: np.ndarray) -> float:
    """Float signed distance from ``p`` to a convex polygon (negative inside)."""
    x, y = p
    w = np.roll(v, -1, axis=0)
    e = w - v
    norms = np.hypot(e[:, 0], e[:, 1])
    side = (e[:, 0] * (y - v[:, 1]) - e[:, 1] * (x - v[:, 0])) / norms
    if side.min() >= 0:
        return float(-side.min())
    return float(_float_seg_dist_many(np.array([p], dtype=float), v, w).min())


def _float_seg_dist_many(pts: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Distances from each point to each segment ``v[k] w[k]``, shape (points, segments)."""
    d = w - v
    L = (d * d).sum(axis=1)
    L = np.where(L == 0, 1.0, L)
    rel = pts[:, None, :] - v[None, :, :]
    t = np.clip((rel * d[None]).sum(axis=2) / L[None], 0.0, 1.0)
    q = v[None] + t[..., None] * d[None]
    return np.hypot(pts[:, None, 0] - q[..., 0], pts[:, None, 1] - q[..., 1])


def contains_points(r: Region, pts: Sequence[Point2], fpts: np.ndarray | None = None) -> np.ndarray:
    """Exact membership of many points in one region, float-filtered."""
    n = len(pts)
    out = np.zeros(n, dtype=bool)
    if n == 0:
        return out
    if fpts is None:
        fpts = np.array([p.as_float() for p in pts], dtype=float)
    scale = 1.0 + float(np.abs(fpts).max())
    tol = _FLOAT_TOL * scale
    if isinstance(r, Disk):
        cx, cy = r._fc
        gap = np.hypot(fpts[:, 0] - cx, fpts[:, 1] - cy) - r._fr
        tol += _FLOAT_TOL * (abs(cx) + abs(cy) + r._fr)
    elif isinstance(r, ConvexPolygon):
        v = r._fv
        w = np.roll(v, -1, axis=0)
        e = w - v
        norms = np.hypot(e[:, 0], e[:, 1])
        side = (e[None, :, 0] * (fpts[:, None, 1] - v[None, :, 1])
                - e[None, :, 1] * (fpts[:, None, 0] - v[None, :, 0])) / norms[None, :]
        gap = -side.min(axis=1)
        tol += _FLOAT_TOL * float(np.abs(v).max())
    elif isinstance(r, PolygonRing):
        v = r._fv
        tol += _FLOAT_TOL * float(np.abs(v).max())
        x0, y0, x1, y1 = r.bbox()
        box = ((fpts[:, 0] >= x0 - tol) & (fpts[:, 0] <= x1 + tol)
               & (fpts[:, 1] >= y0 - tol) & (fpts[:, 1] <= y1 + tol))
        gap = np.full(n, np.inf)
        idx = np.nonzero(box)[0]
        if len(idx):
            inside = _float_ring_contains(v, fpts[idx])
            dist = r.near_boundary(fpts[idx], 2 * tol)
            # far from the boundary only the sign matters
            gap[idx] = np.where(inside, -np.minimum(dist, 1.0), np.minimum(dist, 1.0))
    else:
        for i, p in enumerate(pts):
            out[i] = point_in_region(p, r)
        return out
    out[gap < -tol] = True
    unsure = np.nonzero(np.abs(gap) <= tol)[0]
    for i in unsure:
        out[i] = point_in_region(pts[i], r)
    return out


# ---------------------------------------------------------------------------
# intersection
# ---------------------------------------------------------------------------

def _components(r: Region):
    """Convex pieces: ('pt', p) | ('disk', c, r) | ('poly', verts) | ('cap', a, b, c)."""
    if isinstance(r, PointMass):
        return [("pt", r.center)]
    if isinstance(r, Disk):
        return [("disk", r.center, r.radius)]
    if isinstance(r, ConvexPolygon):
        return [("poly", r.vertices)]
    if isinstance(r, EarRegion):
        return [("disk", r.center, r.disk_radius)] + \
            [("cap", a, b, r.capsule_radius) for a, b in r.capsules()]
    raise TypeError(f"unsupported region {r!r}")


def _convex_polys_intersect(P, Q) -> bool:
    """Separating-axis test for closed convex polygons (exact)."""
    for verts, other in ((P, Q), (Q, P)):
        m = len(verts)
        for i in range(m):
            a, b = verts[i], verts[(i + 1) % m]
            # other lies strictly on the outer side of this edge -> separated
            if all(cross(a, b, q) < 0 for q in other):
                return False
    return True


def _component_pair(u, v) -> bool:
    ku, kv = u[0], v[0]
    order = ("pt", "disk", "cap", "poly")
    if order.index(ku) > order.index(kv):
        u, v = v, u
        ku, kv = kv, ku
    if ku == "pt":
        p = u[1]
        if kv == "pt":
            return p == v[1]
        if kv == "disk":
            return dist2(p, v[1]) <= v[2] ** 2
        if kv == "cap":
            return point_segment_dist2(p, v[1], v[2]) <= v[3] ** 2
        return _in_convex(p, v[1])
    if ku == "disk":
        c, r = u[1], u[2]
        if kv == "disk":
            return dist2(c, v[1]) <= (r + v[2]) ** 2
        if kv == "cap":
            return point_segment_dist2(c, v[1], v[2]) <= (r + v[3]) ** 2
        return point_polygon_dist2(c, v[1]) <= r * r
    if ku == "cap":
        a, b, c = u[1], u[2], u[3]
        if kv == "cap":
            return segment_segment_dist2(a, b, v[1], v[2]) <= (c + v[3]) ** 2
        return segment_polygon_dist2(a, b, v[1]) <= c * c
    return _convex_polys_intersect(u[1], v[1])


def _regions_intersect_exact(a: Region, b: Region) -> bool:
    return any(_component_pair(u, v) for u in _components(a) for v in _components(b))


def _regions_intersect_float(a: Region, b: Region) -> bool | None:
    """Decisive float answer, or None when too close to call."""
    ax0, ay0, ax1, ay1 = a.bbox()
    bx0, by0, bx1, by1 = b.bbox()
    scale = 1.0 + max(abs(ax0), abs(ay0), abs(ax1), abs(ay1), abs(bx0), abs(by0), abs(bx1), abs(by1))
    tol = 8 * _FLOAT_TOL * scale
    if ax0 > bx1 + tol or bx0 > ax1 + tol or ay0 > by1 + tol or by0 > ay1 + tol:
        return False
    if isinstance(a, (Disk, PointMass)) and isinstance(b, (Disk, PointMass)):
        if isinstance(a, PointMass) and isinstance(b, PointMass):
            return None
        ca = a._fc
        cb = b._fc
        ra = a._fr if isinstance(a, Disk) else 0.0
        rb = b._fr if isinstance(b, Disk) else 0.0
        gap = math.hypot(ca[0] - cb[0], ca[1] - cb[1]) - ra - rb
    elif isinstance(a, (Disk, PointMass)) and isinstance(b, ConvexPolygon):
        gap = _float_poly_dist(a._fc, b._fv) - (a._fr if isinstance(a, Disk) else 0.0)
    elif isinstance(b, (Disk, PointMass)) and isinstance(a, ConvexPolygon):
        gap = _float_poly_dist(b._fc, a._fv) - (b._fr if isinstance(b, Disk) else 0.0)
    elif isinstance(a, ConvexPolygon) and isinstance(b, ConvexPolygon):
        gap = _sat_gap(a._fv, b._fv)
    else:
        return None
    if gap > tol:
        return False
    if gap < -tol:
        return True
    return None


def _sat_gap(P: np.ndarray, Q: np.ndarray) -> float:
    """Largest separation along any edge normal (negative means overlap)."""
    best = -math.inf
    for A, Bv in ((P, Q), (Q, P)):
        e = np.roll(A, -1, axis=0) - A
        n = np.stack([e[:, 1], -e[:, 0]], axis=1)
        n /= np.hypot(n[:, 0], n[:, 1])[:, None]
        # outward normal for ccw polygons is (dy, -dx)
        a_max = (A * n).sum(axis=1)
        b_min = (Bv @ n.T).min(axis=0)
        best = max(best, float((b_min - a_max).max()))
    return best


def regions_intersect(a: Region, b: Region) -> bool:
    """True iff the closed regions share a point (exact)."""
    quick = _regions_intersect_float(a, b)
    if quick is not None:
        return quick
    return _regions_intersect_exact(a, b)


def intersection_matrix(B: Sequence[Region], F: Sequence[Region]) -> np.ndarray:
    """``M[i, j]`` = regions_intersect(B[i], F[j]); bbox-culled in numpy."""
    nb, nf = len(B), len(F)
    M = np.zeros((nb, nf), dtype=bool)
    if nb == 0 or nf == 0:
        return M
    bb = np.array([r.bbox() for r in B], dtype=float)
    fb = np.array([r.bbox() for r in F], dtype=float)
    scale = 1.0 + max(np.abs(bb).max(), np.abs(fb).max())
    tol = 8 * _FLOAT_TOL * scale
    overlap = ((bb[:, None, 0] <= fb[None, :, 2] + tol) & (fb[None, :, 0] <= bb[:, None, 2] + tol)
               & (bb[:, None, 1] <= fb[None, :, 3] + tol) & (fb[None, :, 1] <= bb[:, None, 3] + tol))
    # vectorised disk/point pairs
    disky = lambda r: isinstance(r, (Disk, PointMass))
    bi = [i for i, r in enumerate(B) if disky(r)]
    fj = [j for j, r in enumerate(F) if disky(r)]
    done = np.zeros_like(M)
    if bi and fj:
        bc = np.array([B[i]._fc for i in bi])
        br = np.array([B[i]._fr if isinstance(B[i], Disk) else 0.0 for i in bi])
        fc = np.array([F[j]._fc for j in fj])
        fr = np.array([F[j]._fr if isinstance(F[j], Disk) else 0.0 for j in fj])
        gap = np.hypot(bc[:, None, 0] - fc[None, :, 0], bc[:, None, 1] - fc[None, :, 1]) \
            - br[:, None] - fr[None, :]
        sub = np.ix_(bi, fj)
        M[sub] = gap < -tol
        sure = np.abs(gap) > tol
        done[sub] = sure
    for i, j in zip(*np.nonzero(overlap & ~done)):
        M[i, j] = regions_intersect(B[i], F[j])
    return M


# ---------------------------------------------------------------------------
# common intersection of several convex regions (exact)
# ---------------------------------------------------------------------------

def clip_convex(verts: list, a, b) -> list:
    """Clip a convex vertex list to the closed half-plane left of ``a -> b``.

    Degenerate inputs (a segment or a single point) are handled too.
    """
    out = []
    m = len(verts)
    for i in range(m):
        p, q = verts[i], verts[(i + 1) % m]
        sp, sq = cross(a, b, p), cross(a, b, q)
        if sp >= 0:
            out.append(p)
        if (sp > 0 and sq < 0) or (sp < 0 and sq > 0):
            t = sp / (sp - sq)
            out.append(Point2(p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    dedup = []
    for p in out:
        if p not in dedup:
            dedup.append(p)
    return dedup


def _quad_max(x, disks):
    return max(dist2(x, c) - r * r for c, r in disks)


def _disk_minimax_candidates(disks):
    """Rational points that contain the minimiser of max_k |x - c_k|^2 - r_k^2."""
    cands = [c for c, _ in disks]
    # f_k - f_l is affine: 2 (c_l - c_k) . x + |c_k|^2 - |c_l|^2 - r_k^2 + r_l^2
    lines = []
    for (ck, rk), (cl, rl) in combinations(disks, 2):
        ax = 2 * (cl[0] - ck[0])
        ay = 2 * (cl[1] - ck[1])
        rhs = (cl[0] ** 2 + cl[1] ** 2 - rl * rl) - (ck[0] ** 2 + ck[1] ** 2 - rk * rk)
        if ax == 0 and ay == 0:
            continue
        lines.append((ax, ay, rhs))
        # projection of c_k onto the radical line  ax*x + ay*y = rhs
        t = (rhs - ax * ck[0] - ay * ck[1]) / (ax * ax + ay * ay)
        cands.append(Point2(ck[0] + t * ax, ck[1] + t * ay))
    for (a1, b1, r1), (a2, b2, r2) in combinations(lines, 2):
        det = a1 * b2 - a2 * b1
        if det != 0:
            cands.append(Point2((r1 * b2 - r2 * b1) / det, (a1 * r2 - a2 * r1) / det))
    return cands


def _edge_hits_disks(a, b, disks) -> bool:
    dx, dy = b[0] - a[0], b[1] - a[1]
    A = dx * dx + dy * dy
    if A == 0:
        return _quad_max(a, disks) <= 0
    coeffs = []
    for c, r in disks:
        B = 2 * (dx * (a[0] - c[0]) + dy * (a[1] - c[1]))
        C = (a[0] - c[0]) ** 2 + (a[1] - c[1]) ** 2 - r * r
        coeffs.append((B, C))
    ts = {Fraction(0), Fraction(1)}
    for B, _ in coeffs:
        ts.add(-B / (2 * A))
    for (B1, C1), (B2, C2) in combinations(coeffs, 2):
        if B1 != B2:
            ts.add((C2 - C1) / (B1 - B2))
    for t in ts:
        if 0 <= t <= 1 and max(A * t * t + B * t + C for B, C in coeffs) <= 0:
            return True
    return False


def common_intersection(regions: Sequence[Region]) -> bool:
    """Whether closed convex regions (points, disks, polygons) share a point.

    Exact: the minimiser of ``max_k (|x - c_k|^2 - r_k^2)`` over a face of the
    clipped polygon is always one of finitely many rational candidates,
    because differences of the disk quadratics are affine.
    """
    pts = [r.center for r in regions if isinstance(r, PointMass)]
    if pts:
        p = pts[0]
        return all(point_in_region(p, r) for r in regions)
    polys = [r for r in regions if isinstance(r, ConvexPolygon)]
    disks = [(r.center, r.radius) for r in regions if isinstance(r, Disk)]
    if len(polys) + len(disks) != len(regions):
        raise TypeError("common_intersection handles points, disks and convex polygons")
    Q = None
    if polys:
        Q = list(polys[0].vertices)
        for poly in polys[1:]:
            for a, b in poly.edges():
                Q = clip_convex(Q, a, b)
                if not Q:
                    return False
    if not disks:
        return bool(Q)
    if Q is None:
        return any(_quad_max(x, disks) <= 0 for x in _disk_minimax_candidates(disks))
    if any(_quad_max(v, disks) <= 0 for v in Q):
        return True
    m = len(Q)
    for i in range(m if m > 2 else m - 1):
        if _edge_hits_disks(Q[i], Q[(i + 1) % m], disks):
            return True
    for x in _disk_minimax_candidates(disks):
        if _quad_max(x, disks) <= 0 and _in_convex_loose(x, Q):
            return True
    return False


def _in_convex_loose(p, Q) -> bool:
    if len(Q) == 1:
        return p == Q[0]
    if len(Q) == 2:
        return cross(Q[0], Q[1], p) == 0 and _on_segment(p, Q[0], Q[1])
    return _in_convex(p, Q)


def triple_intersection_empty(F: Region, Bi: Region, Bj: Region,
                              approx_vertices: int = 256) -> tuple[bool, bool]:
    """Return ``(empty, approximate)`` for ``F ∩ Bi ∩ Bj``."""
    regs = (F, Bi, Bj)
    if not any(isinstance(r, EarRegion) for r in regs):
        return (not common_intersection(regs), False)
    pieces = []
    for r in regs:
        if isinstance(r, EarRegion):
            comps = [Disk(r.id, r.center, r.disk_radius)]
            for a, b in r.capsules():
                comps.append(capsule_polygon(r.id, a, b, r.capsule_radius, approx_vertices // 8))
            pieces.append(comps)
        else:
            pieces.append([r])
    for combo in _product(pieces):
        if common_intersection(combo):
            return (False, True)
    return (True, True)


def _product(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for rest in _product(lists[1:]):
            yield (head,) + rest


def capsule_polygon(rid: int, a: Point2, b: Point2, c: Fraction, per_cap: int = 16):
    """Convex polygon circumscribing the capsule ``seg(a, b) ⊕ disk(c)``."""
    ax, ay = a.as_float()
    bx, by = b.as_float()
    cf = float(c)
    if cf == 0:
        cf = 1e-12
    theta = math.atan2(by - ay, bx - ax)
    scale = 1.0 / math.cos(math.pi / (2 * per_cap))
    pts = []
    for end, base in (((bx, by), theta - math.pi / 2), ((ax, ay), theta + math.pi / 2)):
        for k in range(per_cap + 1):
            ang = base + math.pi * k / per_cap
            pts.append(Point2(dyadic(end[0] + cf * scale * math.cos(ang)),
                              dyadic(end[1] + cf * scale * math.sin(ang))))
    hull = convex_hull(pts)
    return ConvexPolygon(rid, tuple(hull))


def convex_hull(points: Iterable[Point2]) -> list:
    """Andrew's monotone chain with exact predicates; strictly convex ccw output."""
    pts = sorted(set(points), key=lambda p: (p.x, p.y))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


# ---------------------------------------------------------------------------
# boundary crossings
# ---------------------------------------------------------------------------

class PseudoDiskReport(NamedTuple):
    ok: bool
    violations: list
    approximate: bool


def crossing_count_is_exact(a: Region, b: Region) -> bool:
    return (isinstance(a, Disk) and isinstance(b, Disk)) or \
        (isinstance(a, ConvexPolygon) and isinstance(b, ConvexPolygon))


def _disk_disk_crossings(a: Disk, b: Disk) -> int:
    d2 = dist2(a.center, b.center)
    rs = (a.radius + b.radius) ** 2
    rd = (a.radius - b.radius) ** 2
    if d2 == 0 and rd == 0:
        raise DegenerateGeometryError(f"disks {a.id} and {b.id} coincide")
    if d2 > rs or d2 < rd:
        return 0
    if d2 == rs or d2 == rd:
        return 1
    return 2


def _poly_status(p, verts) -> int:
    """1 inside, -1 outside, 0 on the boundary."""
    m = len(verts)
    on = False
    for i in range(m):
        c = cross(verts[i], verts[(i + 1) % m], p)
        if c < 0:
            return -1
        if c == 0:
            on = True
    return 0 if on else 1


def _bbox_disjoint(a, b) -> bool:
    ax0, ay0, ax1, ay1 = a.bbox()
    bx0, by0, bx1, by1 = b.bbox()
    tol = 1e-7 * (1 + max(map(abs, (ax0, ay0, ax1, ay1, bx0, by0, bx1, by1))))
    return ax0 > bx1 + tol or bx0 > ax1 + tol or ay0 > by1 + tol or by0 > ay1 + tol


def _poly_poly_crossings(P: ConvexPolygon, Q: ConvexPolygon) -> int:
    """Transversal crossings of two polygon boundaries, exact.

    Walk ``∂P``, record inside/outside status of ``Q`` at vertices and on every
    sub-piece between consecutive contact points, count status flips.
    """
    if _bbox_disjoint(P, Q):
        return 0
    qv = Q.vertices
    statuses = []
    for a, b in P.edges():
        statuses.append(_poly_status(a, qv))
        dx, dy = b.x - a.x, b.y - a.y
        ts = set()
        for c, d in Q.edges():
            den = dx * (d.y - c.y) - dy * (d.x - c.x)
            if den == 0:
                if cross(c, d, a) == 0:
                    # collinear: contact on an interval; endpoints bound it
                    for e in (c, d):
                        if _on_segment(e, a, b):
                            L = dx * dx + dy * dy
                            ts.add(((e.x - a.x) * dx + (e.y - a.y) * dy) / L)
                continue
            t = ((c.x - a.x) * (d.y - c.y) - (c.y - a.y) * (d.x - c.x)) / den
            u = ((c.x - a.x) * dy - (c.y - a.y) * dx) / den
            if 0 <= t <= 1 and 0 <= u <= 1:
                ts.add(t)
        ts = sorted(t for t in ts if 0 < t < 1)
        bounds = [Fraction(0)] + ts + [Fraction(1)]
        for k in range(len(bounds) - 1):
            tm = (bounds[k] + bounds[k + 1]) / 2
            mid = Point2(a.x + tm * dx, a.y + tm * dy)
            statuses.append(_poly_status(mid, qv))
    seq = [s for s in statuses if s != 0]
    if not seq:
        raise DegenerateGeometryError(f"polygons {P.id} and {Q.id} share their boundary")
    return sum(1 for i in range(len(seq)) if seq[i] != seq[i - 1])


def boundary_samples(r: Region, samples: int = DEFAULT_SAMPLES) -> np.ndarray:
    """Ordered float samples along ``∂r`` (cyclic)."""
    if isinstance(r, Disk):
        th = np.linspace(0.0, 2 * math.pi, samples, endpoint=False)
        cx, cy = r._fc
        return np.stack([cx + r._fr * np.cos(th), cy + r._fr * np.sin(th)], axis=1)
    if isinstance(r, (ConvexPolygon, PolygonRing)):
        v = r._fv
        w = np.roll(v, -1, axis=0)
        t = np.linspace(0.0, 1.0, max(samples, 1), endpoint=False)
        pts = v[:, None, :] + t[None, :, None] * (w - v)[:, None, :]
        return pts.reshape(-1, 2)
    if isinstance(r, EarRegion):
        th = ear_angles(r, samples, samples)
        rad = ear_radial(r, th)
        o = r._float[0]
        return np.stack([o[0] + rad * np.cos(th), o[1] + rad * np.sin(th)], axis=1)
    raise TypeError(f"no boundary for {r!r}")


def _capsule_radial(th: np.ndarray, p: tuple, c: float) -> np.ndarray:
    """Exit distance along direction ``th`` from the capsule ``seg(0, p) ⊕ disk(c)``."""
    L = math.hypot(*p)
    ux, uy = np.cos(th), np.sin(th)
    up = ux * p[0] + uy * p[1]
    out = np.full(th.shape, c)
    disc = up * up - L * L + c * c
    ok = disc >= 0
    out[ok] = np.maximum(out[ok], up[ok] + np.sqrt(disc[ok]))
    if L > 0:
        cosphi = up / L
        sinphi = np.abs(ux * p[1] - uy * p[0]) / L
        with np.errstate(divide="ignore", invalid="ignore"):
            flat = np.where(sinphi > 0, c / sinphi, np.inf)
            lim = np.where(cosphi > 0, L / cosphi, 0.0)
        t = np.minimum(flat, lim)
        mask = cosphi > 0
        out[mask] = np.maximum(out[mask], t[mask])
    return out


def ear_radial(r: EarRegion, th: np.ndarray) -> np.ndarray:
    o, a, b, R, c = r._float
    rad = np.full(th.shape, R)
    for p in (a, b):
        rad = np.maximum(rad, _capsule_radial(th, (p[0] - o[0], p[1] - o[1]), c))
    return rad


def ear_angles(r: EarRegion, uniform: int, window: int) -> np.ndarray:
    """Sample angles: ``uniform`` evenly spaced plus dense windows at the capsules."""
    o, a, b, R, c = r._float
    th = [np.linspace(0.0, 2 * math.pi, uniform, endpoint=False)]
    for p in (a, b):
        phi = math.atan2(p[1] - o[1], p[0] - o[0])
        w = math.asin(min(1.0, c / R)) if c > 0 else 0.0
        if w > 0 and window > 0:
            th.append(phi + np.linspace(-w, w, window))
    out = np.mod(np.concatenate(th), 2 * math.pi)
    out = np.unique(np.round(out, 15))
    return out


def _float_contains(r: Region, pts: np.ndarray) -> np.ndarray:
    x, y = pts[:, 0], pts[:, 1]
    if isinstance(r, Disk):
        cx, cy = r._fc
        return np.hypot(x - cx, y - cy) <= r._fr
    if isinstance(r, ConvexPolygon):
        v = r._fv
        w = np.roll(v, -1, axis=0)
        e = w - v
        side = e[None, :, 0] * (y[:, None] - v[None, :, 1]) - e[None, :, 1] * (x[:, None] - v[None, :, 0])
        return (side >= 0).all(axis=1)
    if isinstance(r, EarRegion):
        o, a, b, R, c = r._float
        inside = np.hypot(x - o[0], y - o[1]) <= R
        for p in (a, b):
            inside |= _float_seg_dist(pts, o, p) <= c
        return inside
    if isinstance(r, PolygonRing):
        return _float_ring_contains(r._fv, pts)
    raise TypeError(f"unsupported region {r!r}")


def _float_seg_dist(pts: np.ndarray, a, b) -> np.ndarray:
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    L = dx * dx + dy * dy
    t = np.zeros(len(pts)) if L == 0 else np.clip(((pts[:, 0] - ax) * dx + (pts[:, 1] - ay) * dy) / L, 0, 1)
    return np.hypot(pts[:, 0] - (ax + t * dx), pts[:, 1] - (ay + t * dy))


def _float_ring_contains(v: np.ndarray, pts: np.ndarray) -> np.ndarray:
    w = np.roll(v, -1, axis=0)
    x = pts[:, 0][:, None]
    y = pts[:, 1][:, None]
    cond = (v[None, :, 1] > y) != (w[None, :, 1] > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = v[None, :, 0] + (y - v[None, :, 1]) * (w[None, :, 0] - v[None, :, 0]) / (w[None, :, 1] - v[None, :, 1])
    hits = cond & (x < xint)
    return (hits.sum(axis=1) % 2) == 1


def _sampled_crossings(a: Region, b: Region, samples: int) -> int:
    best = 0
    for u, v in ((a, b), (b, a)):
        pts = boundary_samples(u, samples)
        st = _float_contains(v, pts)
        best = max(best, int(np.count_nonzero(st != np.roll(st, 1))))
    return best


def boundary_intersection_count(a: Region, b: Region, samples_per_edge: int = DEFAULT_SAMPLES) -> int:
    """Number of crossings of ``∂a`` and ``∂b``.

    Exact for disk/disk (tangency counts as one point) and polygon/polygon
    (transversal crossings).  Other pairs are counted by sampling ``∂a`` and
    ``∂b`` at the given density and counting inside/outside flips; see
    :func:`crossing_count_is_exact`.
    """
    if isinstance(a, PointMass) or isinstance(b, PointMass):
        raise ValueError("point masses have no boundary")
    if isinstance(a, Disk) and isinstance(b, Disk):
        return _disk_disk_crossings(a, b)
    if isinstance(a, ConvexPolygon) and isinstance(b, ConvexPolygon):
        return _poly_poly_crossings(a, b)
    if _bbox_disjoint(a, b):
        return 0
    return _sampled_crossings(a, b, samples_per_edge)


def is_pseudo_disk_family(regions: Sequence[Region], samples_per_edge: int = DEFAULT_SAMPLES,
                          max_crossings: int = 2) -> PseudoDiskReport:
    """Check that every pair of boundaries crosses at most ``max_crossings`` times."""
    violations = []
    approximate = False
    for a, b in combinations(regions, 2):
        if isinstance(a, PointMass) or isinstance(b, PointMass):
            raise ValueError("pseudo-disk check needs regions with boundaries")
        approximate |= not crossing_count_is_exact(a, b)
        try:
            k = boundary_intersection_count(a, b, samples_per_edge)
        except DegenerateGeometryError:
            violations.append((a.id, b.id, None))
            continue
        if k > max_crossings:
            violations.append((a.id, b.id, k))
    return PseudoDiskReport(not violations, violations, approximate)


# ---------------------------------------------------------------------------
# polygonal approximation
# ---------------------------------------------------------------------------

def regular_polygon(rid: int, center: Point2, radius, vertices: int, phase: float = 0.0) -> ConvexPolygon:
    """Inscribed regular polygon with dyadic vertices strictly inside the circle."""
    cx, cy = center.as_float()
    r = float(radius) * (1 - 1e-9)
    pts = []
    for k in range(vertices):
        ang = phase + 2 * math.pi * k / vertices
        pts.append(Point2(dyadic(cx + r * math.cos(ang)), dyadic(cy + r * math.sin(ang))))
    return ConvexPolygon(rid, tuple(pts))


def ear_ring(r: EarRegion, vertices: int = 256, window: int | None = None) -> PolygonRing:
    """Star-shaped ring through sampled points of ``∂r``."""
    if window is None:
        window = max(8, vertices // 8)
    th = ear_angles(r, vertices, window)
    rad = ear_radial(r, th)
    o = r._float[0]
    pts = [Point2(dyadic(o[0] + q * math.cos(t)), dyadic(o[1] + q * math.sin(t)))
           for t, q in zip(th, rad)]
    dedup = []
    for p in pts:
        if not dedup or dedup[-1] != p:
            dedup.append(p)
    if dedup[0] == dedup[-1]:
        dedup.pop()
    return PolygonRing(r.id, tuple(dedup))


def polygonize(r: Region, vertices: int = 64):
    """Polygonal stand-in for ``r``: ConvexPolygon or PolygonRing."""
    if isinstance(r, ConvexPolygon):
        return r
    if isinstance(r, Disk):
        return regular_polygon(r.id, r.center, r.radius, vertices)
    if isinstance(r, EarRegion):
        return ear_ring(r, vertices)
    if isinstance(r, PolygonRing):
        return r
    raise ValueError(f"region {r.id} of kind {r.kind} has no polygonal approximation")
