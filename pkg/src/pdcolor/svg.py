"""SVG rendering of scenes and arrangements."""

from __future__ import annotations

from typing import Optional
from xml.sax.saxutils import escape

import numpy as np

from .arrangement import Arrangement, face_polygons
from .geom import ConvexPolygon, Disk, EarRegion, PointMass, PolygonRing, Scene, boundary_samples

PALETTE = ["#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4", "#f032e6",
           "#bfef45", "#469990", "#9a6324", "#800000", "#808000", "#000075", "#a9a9a9"]


def _color(i: int) -> str:
    return PALETTE[i % len(PALETTE)]


def _outline(r) -> list:
    if isinstance(r, (ConvexPolygon, PolygonRing)):
        return [v.as_float() for v in r.vertices]
    if isinstance(r, (Disk, EarRegion)):
        return [tuple(p) for p in boundary_samples(r, 128)]
    return []


def render_svg(scene: Scene, coloring=None, arrangement: Optional[Arrangement] = None,
               size: int = 600, title: str = "") -> str:
    """Faces shaded by depth (if an arrangement is given), B outlined and
    colored by ``coloring``, F drawn faintly."""
    shapes = list(scene.B) + ([] if scene.all_points else list(scene.F))
    boxes = np.array([r.bbox() for r in shapes]) if shapes else np.array([[0, 0, 1, 1]])
    x0, y0 = boxes[:, 0].min(), boxes[:, 1].min()
    x1, y1 = boxes[:, 2].max(), boxes[:, 3].max()
    span = max(x1 - x0, y1 - y0, 1e-9)
    pad = 0.05 * span
    scale = size / (span + 2 * pad)

    def tx(p):
        return f"{(p[0] - x0 + pad) * scale:.3f},{(y1 - p[1] + pad) * scale:.3f}"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">']
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append(f'<rect width="{size}" height="{size}" fill="white"/>')
    if arrangement is not None:
        top = max((f.depth for f in arrangement.faces), default=1) or 1
        for depth, rings in face_polygons(arrangement):
            if depth == 0 or not rings:
                continue
            d = " ".join("M " + " L ".join(tx(p) for p in ring) + " Z" for ring in rings)
            shade = int(235 - 175 * depth / top)
            out.append(f'<path d="{d}" fill="rgb({shade},{shade},{shade})" fill-rule="evenodd" '
                       f'stroke="none"><title>depth {depth}</title></path>')
    if not scene.all_points:
        for r in scene.F:
            pts = _outline(r)
            if pts:
                out.append(f'<polygon points="{" ".join(tx(p) for p in pts)}" fill="none" '
                           f'stroke="#bbbbbb" stroke-width="0.5"/>')
            elif isinstance(r, PointMass):
                cx, cy = tx(r.center.as_float()).split(",")
                out.append(f'<circle cx="{cx}" cy="{cy}" r="1.5" fill="#bbbbbb"/>')
    for i, r in enumerate(scene.B):
        col = _color(coloring.colors[i]) if coloring is not None else "#333333"
        pts = _outline(r)
        if pts:
            out.append(f'<polygon points="{" ".join(tx(p) for p in pts)}" fill="none" '
                       f'stroke="{col}" stroke-width="1.5"><title>B{i} (id {r.id})</title></polygon>')
        else:
            cx, cy = tx(r.center.as_float()).split(",")
            out.append(f'<circle cx="{cx}" cy="{cy}" r="4" fill="{col}"><title>B{i} (id {r.id})</title></circle>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
