"""Proper and conflict-free coloring of pseudo-disk intersection hypergraphs."""

from .arrangement import Arrangement, build_arrangement, count_k_deep_faces, union_complexity
from .coloring import Coloring, conflict_free_coloring, proper_color_hypergraph
from .geom import (ConvexPolygon, DegenerateGeometryError, Disk, EarRegion, Point2, PointMass,
                   Scene, region_from_json)
from .hypergraph import (Graph, IntersectionHypergraph, build_intersection_hypergraph,
                         delaunay_graph, point_closure, restricted_delaunay_graph, supports)

__version__ = "0.1.0"
__all__ = [
    "Arrangement", "Coloring", "ConvexPolygon", "DegenerateGeometryError", "Disk", "EarRegion",
    "Graph", "IntersectionHypergraph", "Point2", "PointMass", "Scene", "build_arrangement",
    "build_intersection_hypergraph", "conflict_free_coloring", "count_k_deep_faces",
    "delaunay_graph", "point_closure", "proper_color_hypergraph", "region_from_json",
    "restricted_delaunay_graph", "supports", "union_complexity",
]
