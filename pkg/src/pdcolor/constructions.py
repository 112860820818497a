"""Instance generators: random families and named configurations."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Optional, Sequence

from .geom import (ConvexPolygon, Disk, EarRegion, Point2, PointMass, Scene, dist2, dyadic,
                   point_in_region)

DEFAULT_BBOX = (0.0, 0.0, 10.0, 10.0)
# a convex pentagon used as the default homothet base
DEFAULT_BASE = ConvexPolygon(-1, ((0, 0), (2, 0), (Fraction(5, 2), Fraction(3, 2)),
                                  (1, Fraction(5, 2)), (Fraction(-1, 2), Fraction(3, 2))))
GENERATOR_KINDS = ("random_disks", "homothets", "random_points", "bear_ears", "k4_points")


def _coord(rng: random.Random, lo: float, hi: float) -> Fraction:
    # dyadic with random low bits, so coincidences have probability ~2^-40
    return dyadic(rng.uniform(lo, hi))


def gen_random_disks(n: int, seed: int, radius_range=(0.5, 2.0), bbox=DEFAULT_BBOX,
                     id_offset: int = 0) -> list:
    rng = random.Random(seed)
    x0, y0, x1, y1 = bbox
    return [Disk(id_offset + i, Point2(_coord(rng, x0, x1), _coord(rng, y0, y1)),
                 _coord(rng, *radius_range)) for i in range(n)]


def gen_random_points(n: int, seed: int, bbox=DEFAULT_BBOX, id_offset: int = 0) -> list:
    rng = random.Random(seed)
    x0, y0, x1, y1 = bbox
    return [PointMass(id_offset + i, Point2(_coord(rng, x0, x1), _coord(rng, y0, y1)))
            for i in range(n)]


def gen_homothets(base: ConvexPolygon, n: int, seed: int, scale_range=(0.5, 2.0),
                  bbox=DEFAULT_BBOX, id_offset: int = 0) -> list:
    """Positive homothets ``t + s * base`` with dyadic scale and translation."""
    rng = random.Random(seed)
    x0, y0, x1, y1 = bbox
    out = []
    for i in range(n):
        s = _coord(rng, *scale_range) if scale_range[0] != scale_range[1] else Fraction(scale_range[0])
        tx, ty = _coord(rng, x0, x1), _coord(rng, y0, y1)
        out.append(ConvexPolygon(id_offset + i, tuple(Point2(tx + s * v.x, ty + s * v.y)
                                                      for v in base.vertices)))
    return out


def default_epsilon(n: int) -> Fraction:
    return Fraction(1, 64 * n * n)


def circle_points(n: int, radius: int = 2, denominator: int = 10 ** 6) -> list:
    pts = []
    for k in range(n):
        a = 2 * math.pi * k / n
        pts.append(Point2(Fraction(round(radius * math.cos(a) * denominator), denominator),
                          Fraction(round(radius * math.sin(a) * denominator), denominator)))
    return pts


def gen_bear_ears(n: int, epsilon: Optional[Fraction] = None, seed: int = 0) -> tuple:
    """``n`` points on the radius-2 circle and one ear region per pair.

    The region for ``i < j`` (0-based) is the disk of radius
    ``1 + (i*n + j) * eps`` about the origin united with the two capsules of
    radius ``(i*n + j) * eps`` around the segments to ``p_i`` and ``p_j``.
    ``seed`` is accepted for interface uniformity; the output is fixed.
    """
    if n < 2:
        raise ValueError("need at least two points")
    eps = default_epsilon(n) if epsilon is None else Fraction(epsilon)
    if not (eps > 0 and (n * n - 1) * eps < Fraction(1, 4)):
        raise ValueError(f"epsilon {eps} violates (n^2 - 1) * epsilon < 1/4")
    pts = circle_points(n)
    S = [PointMass(k, p) for k, p in enumerate(pts)]
    origin = Point2(0, 0)
    F = []
    for i in range(n):
        for j in range(i + 1, n):
            t = (i * n + j) * eps
            F.append(EarRegion(n + len(F), origin, pts[i], pts[j], 1 + t, t))
    return S, F


def bear_ears_membership_ok(S: Sequence[PointMass], F: Sequence[EarRegion]) -> bool:
    """Each ear contains exactly its two anchor points of ``S``."""
    for f in F:
        inside = [s.center for s in S if point_in_region(s.center, f)]
        if sorted(inside, key=lambda p: (p.x, p.y)) != sorted([f.anchor_i, f.anchor_j],
                                                              key=lambda p: (p.x, p.y)):
            return False
    return True


K4_TRIANGLE = (Point2(0, 0), Point2(1, 0), Point2(Fraction(1, 2), Fraction(7, 8)))


def gen_k4_points(seed: int = 0) -> list:
    """Triangle corners plus its centroid moved by a tiny dyadic jitter."""
    rng = random.Random(seed)
    a, b, c = K4_TRIANGLE
    cx = (a.x + b.x + c.x) / 3 + Fraction(rng.randint(-8, 8), 1 << 12)
    cy = (a.y + b.y + c.y) / 3 + Fraction(rng.randint(-8, 8), 1 << 12)
    return [PointMass(i, p) for i, p in enumerate((a, b, c, Point2(cx, cy)))]


def pair_witness_disks(points: Sequence[PointMass], id_offset: int = 100, steps: int = 64) -> list:
    """For each pair, a disk through both points containing no other point.

    Centers are tried along the perpendicular bisector; the first offset that
    excludes every other point wins.  Pairs without such a disk are skipped.
    """
    out = []
    pts = [p.center for p in points]
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            p, q = pts[i], pts[j]
            mx, my = (p.x + q.x) / 2, (p.y + q.y) / 2
            nx, ny = -(q.y - p.y), q.x - p.x
            found = None
            for k in range(steps + 1):
                for sgn in (1, -1):
                    t = sgn * Fraction(k, 8)
                    c = Point2(mx + t * nx, my + t * ny)
                    r2 = dist2(c, p)
                    if all(dist2(c, pts[m]) > r2 for m in range(len(pts)) if m not in (i, j)):
                        found = c, r2
                        break
                if found:
                    break
            if found is None:
                continue
            c, r2 = found
            # radius slightly above sqrt(r2), rational, still excluding the rest
            r = dyadic(math.sqrt(float(r2)) * (1 + 1e-9) + 1e-12)
            while r * r < r2:
                r += Fraction(1, 1 << 40)
            disk = Disk(id_offset + len(out), c, r)
            if sum(point_in_region(x, disk) for x in pts) == 2:
                out.append(disk)
    return out


def k4_scene(seed: int = 0) -> Scene:
    B = gen_k4_points(seed)
    return Scene(tuple(B), tuple(pair_witness_disks(B)))


def load_base_polygon(data: dict) -> ConvexPolygon:
    from .geom import region_from_json
    poly = region_from_json({"id": -1, "kind": "polygon", **data})
    return poly


def generate(kind: str, n: int, seed: int, *, epsilon=None, base: Optional[ConvexPolygon] = None,
             radius_range=(0.5, 2.0), bbox=DEFAULT_BBOX, f_count: Optional[int] = None) -> Scene:
    """Scene for a generator kind; random kinds pair ``n`` regions with ``f_count`` disks."""
    f_count = 2 * n if f_count is None else f_count
    if kind == "random_disks":
        B = gen_random_disks(n, seed, radius_range, bbox)
        F = gen_random_disks(f_count, seed + 1_000_003, radius_range, bbox, id_offset=n)
        return Scene(tuple(B), tuple(F))
    if kind == "homothets":
        base = base or DEFAULT_BASE
        B = gen_homothets(base, n, seed, radius_range, bbox)
        F = gen_homothets(base, f_count, seed + 1_000_003, radius_range, bbox, id_offset=n)
        return Scene(tuple(B), tuple(F))
    if kind == "random_points":
        B = gen_random_points(n, seed, bbox)
        F = gen_random_disks(f_count, seed + 1_000_003, radius_range, bbox, id_offset=n)
        return Scene(tuple(B), tuple(F))
    if kind == "bear_ears":
        S, F = gen_bear_ears(n, epsilon, seed)
        return Scene(tuple(S), tuple(F))
    if kind == "k4_points":
        return k4_scene(seed)
    raise ValueError(f"unknown generator kind {kind!r}")


def gen_lattice_squares(n: int, seed: int, span: int = 8, sides=(1, 4), id_offset: int = 0) -> list:
    """Axis-parallel squares whose coordinates are integers plus ``i / (n + 1)``.

    Square ``i`` is shifted by ``i / (n + 1)`` in both axes, so no two squares
    share a boundary line and every face is at least ``1 / (n + 1)`` wide.
    """
    rng = random.Random(seed)
    h = Fraction(1, n + 1)
    out = []
    for i in range(n):
        s = rng.randint(*sides)
        x = rng.randint(0, span) + (i + 1) * h
        y = rng.randint(0, span) + (i + 1) * h
        out.append(ConvexPolygon(id_offset + i, ((x, y), (x + s, y), (x + s, y + s), (x, y + s))))
    return out
