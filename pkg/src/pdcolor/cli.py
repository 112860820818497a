"""Command-line interface: ``pdcolor <command> ...``.

Exit codes: 0 ok, 2 unparseable input, 3 a verification failed, 4 the
exact search budget ran out.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import __version__
from .acceptance import CRITERIA, threads
from .arrangement import build_arrangement, stats_row
from .coloring import (DEFAULT_BUDGET, Coloring, conflict_free_coloring, proper_color_hypergraph)
from .constructions import GENERATOR_KINDS, bear_ears_membership_ok, generate, load_base_polygon
from .geom import EarRegion, PointMass, Scene
from .hypergraph import (IntersectionHypergraph, build_intersection_hypergraph, delaunay_graph,
                         hyperedge_census, point_closure, restricted_delaunay_graph,
                         verify_witnesses)
from .svg import render_svg
from .verify import (VerificationReport, check_conflict_free, check_count_bounds, check_planarity,
                     check_proper, vc_dimension)

EXIT_OK, EXIT_PARSE, EXIT_VERIFY, EXIT_BUDGET = 0, 2, 3, 4


class InputError(Exception):
    """An input file could not be read or parsed."""


# ---------------------------------------------------------------------------
# I/O helpers
# ---------------------------------------------------------------------------

def _sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def load_scene(path: str) -> Scene:
    data = _load_json(path)
    try:
        return Scene.from_json(data.get("scene", data))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{path}: not a scene ({exc})") from exc


def load_hypergraph(path: str) -> IntersectionHypergraph:
    data = _load_json(path)
    try:
        return IntersectionHypergraph.from_json(data.get("hypergraph", data))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: not a hypergraph ({exc})") from exc


def load_coloring(path: str) -> Coloring:
    data = _load_json(path)
    try:
        return Coloring.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: not a coloring ({exc})") from exc


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the target directory and rename."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def run_config(args: argparse.Namespace) -> dict:
    """The parsed arguments as a JSON-friendly dict, minus the dispatch hook."""
    cfg = {}
    for k, v in sorted(vars(args).items()):
        if k == "func":
            continue
        cfg[k] = str(v) if isinstance(v, Fraction) else v
    cfg["version"] = __version__
    return cfg


def _inputs(paths) -> dict:
    return {p: _sha256(p) for p in paths if p}


def _header(args, paths) -> dict:
    return {"config": run_config(args), "inputs": _inputs(paths)}


def _emit(args, text: str) -> None:
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _sampling(args):
    return ("grid", args.grid_step) if args.grid_step else "arrangement"


def _hypergraph(scene: Scene, args) -> IntersectionHypergraph:
    hg = IntersectionHypergraph(len(scene.B)) if scene.all_points else build_intersection_hypergraph(scene)
    if args.close or scene.all_points:
        hg = point_closure(scene, hg, _sampling(args), args.approx_vertices)
    return hg


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_gen(args) -> int:
    base = load_base_polygon(_load_json(args.base_polygon)) if args.base_polygon else None
    try:
        scene = generate(args.kind, args.n, args.seed, epsilon=args.epsilon, base=base,
                         radius_range=(args.radius_min, args.radius_max), f_count=args.f_count)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    doc = _header(args, [args.base_polygon])
    doc["scene"] = scene.to_json()
    _emit(args, _dumps(doc))
    return EXIT_OK


def cmd_hypergraph(args) -> int:
    scene = load_scene(args.scene)
    hg = _hypergraph(scene, args)
    doc = _header(args, [args.scene])
    doc["hypergraph"] = hg.to_json()
    _emit(args, _dumps(doc))
    return EXIT_OK


def _coloring_doc(args, paths, col: Coloring) -> str:
    doc = _header(args, paths)
    doc.update(col.to_json())
    return _dumps(doc)


def cmd_color(args) -> int:
    scene = load_scene(args.scene)
    hg = load_hypergraph(args.hypergraph) if args.hypergraph else _hypergraph(scene, args)
    col = proper_color_hypergraph(scene, hg, args.budget)
    _emit(args, _coloring_doc(args, [args.scene, args.hypergraph], col))
    return EXIT_BUDGET if col.method == "greedy_fallback(budget)" else EXIT_OK


def cmd_cfcolor(args) -> int:
    scene = load_scene(args.scene)
    hg = load_hypergraph(args.hypergraph) if args.hypergraph else _hypergraph(scene, args)
    budget_hit = []

    def colorer(sub, sub_hg):
        col = proper_color_hypergraph(sub, sub_hg, args.budget)
        if col.method == "greedy_fallback(budget)":
            budget_hit.append(True)
        return col

    col = conflict_free_coloring(scene, hg, colorer, close=args.close,
                                 approx_vertices=args.approx_vertices)
    _emit(args, _coloring_doc(args, [args.scene, args.hypergraph], col))
    return EXIT_BUDGET if budget_hit else EXIT_OK


def verify_scene(path: str, coloring_path, close: bool, sampling, approx_vertices: int,
                 budget: int) -> list:
    """All applicable checks for one scene, as report dicts."""
    scene = load_scene(path)
    reports = []

    def add(rep: VerificationReport):
        reports.append({"scene": path, **rep.to_json()})

    hg = IntersectionHypergraph(len(scene.B)) if scene.all_points else build_intersection_hypergraph(scene)
    bad = verify_witnesses(scene, hg)
    add(VerificationReport("witnesses", bad is None, {} if bad is None else {"hyperedge": list(bad)}))
    if close or scene.all_points:
        hg = point_closure(scene, hg, sampling, approx_vertices)
    # ear regions cross up to four times, so the pseudo-disk claims are recorded but not enforced
    ears = any(isinstance(f, EarRegion) for f in scene.F)

    def claim(rep: VerificationReport, name=None):
        add(rep)
        if name:
            reports[-1]["claim"] = name
        if ears:
            reports[-1]["informational"] = True

    claim(check_planarity(delaunay_graph(hg)), "delaunay_planar")
    claim(check_planarity(restricted_delaunay_graph(scene, hg)), "restricted_delaunay_planar")
    col = load_coloring(coloring_path) if coloring_path else proper_color_hypergraph(scene, hg, budget)
    if coloring_path and col.method.startswith("conflict_free"):
        add(check_conflict_free(hg, col))
    else:
        add(check_proper(hg, col))
        claim(VerificationReport("palette_at_most_4", col.palette_size <= 4,
                                 {"palette": col.palette_size, "method": col.method}))
    if hg.n <= 25:
        d = vc_dimension(hg)
        claim(VerificationReport("vc_dimension_at_most_4", d <= 4, {"vc_dimension": d}))
    regions = [b for b in scene.B if not isinstance(b, PointMass)]
    if regions:
        arr = build_arrangement(regions, approx_vertices)
        stats = stats_row(arr)
        add(check_count_bounds(stats))
        add(VerificationReport("euler", arr.euler_ok(), {"faces": len(arr.faces)}))
    if (not scene.all_points and scene.F and all(isinstance(b, PointMass) for b in scene.B)
            and all(isinstance(f, EarRegion) for f in scene.F)):
        n = len(scene.B)
        complete = sorted(hg.edges) == [(i, j) for i in range(n) for j in range(i + 1, n)]
        add(VerificationReport("bear_ears_complete_graph",
                               complete and bear_ears_membership_ok(scene.B, scene.F),
                               {"n": n, "edges": len(hg.edges)}))
    return reports


def _map(fn, *iterables):
    workers = threads()
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            yield from ex.map(fn, *iterables)
    else:
        yield from map(fn, *iterables)


def cmd_verify(args) -> int:
    lines = [json.dumps(_header(args, args.scenes + [args.coloring]), sort_keys=True)]
    failed = False
    n = len(args.scenes)
    results = _map(verify_scene, args.scenes, [args.coloring] * n, [args.close] * n,
                   [_sampling(args)] * n, [args.approx_vertices] * n, [args.budget] * n)
    for reports in results:
        for rep in reports:
            lines.append(json.dumps(rep, sort_keys=True))
            failed |= not rep["passed"] and not rep.get("informational")
        if failed and args.fail_fast:
            break
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_VERIFY if failed else EXIT_OK


STATS_FIELDS = ["scene", "n", "m", "vertices", "edges", "faces", "union_edge_count",
                "union_vertex_count", "k1", "k2", "k3", "k4", "k5", "hyperedges",
                "census_2", "census_3", "census_4", "census_5", "palette", "coloring_method"]


def stats_scene(path: str, close: bool, sampling, approx_vertices: int, budget: int) -> dict:
    scene = load_scene(path)
    hg = IntersectionHypergraph(len(scene.B)) if scene.all_points else build_intersection_hypergraph(scene)
    if close or scene.all_points:
        hg = point_closure(scene, hg, sampling, approx_vertices)
    row = {k: "" for k in STATS_FIELDS}
    row.update(scene=path, n=len(scene.B), m=0 if scene.all_points else len(scene.F))
    regions = [b for b in scene.B if not isinstance(b, PointMass)]
    if regions:
        st = stats_row(build_arrangement(regions, approx_vertices))
        row.update({k: v for k, v in st.items() if k != "n"})
    row["hyperedges"] = len(hg)
    for k, c in hyperedge_census(hg, 5).items():
        row[f"census_{k}"] = c
    col = proper_color_hypergraph(scene, hg, budget)
    row.update(palette=col.palette_size, coloring_method=col.method)
    return row


def cmd_stats(args) -> int:
    buf = io.StringIO()
    buf.write("# " + json.dumps(_header(args, args.scenes), sort_keys=True) + "\n")
    writer = csv.DictWriter(buf, fieldnames=STATS_FIELDS, lineterminator="\n")
    writer.writeheader()
    n = len(args.scenes)
    for row in _map(stats_scene, args.scenes, [args.close] * n, [_sampling(args)] * n,
                    [args.approx_vertices] * n, [args.budget] * n):
        writer.writerow(row)
    _emit(args, buf.getvalue())
    return EXIT_OK


def cmd_svg(args) -> int:
    scene = load_scene(args.scene)
    col = load_coloring(args.coloring) if args.coloring else None
    if col is not None and len(col) != len(scene.B):
        raise InputError("coloring length does not match the scene")
    regions = [b for b in scene.B if not isinstance(b, PointMass)]
    arr = build_arrangement(regions, args.approx_vertices) if regions and not args.no_faces else None
    svg = render_svg(scene, col, arr, size=args.size, title=Path(args.scene).name)
    meta = json.dumps(_header(args, [args.scene, args.coloring]), sort_keys=True).replace("--", "- -")
    svg = svg.replace(">", f"><!-- {meta} -->", 1)
    _emit(args, svg)
    return EXIT_OK


def cmd_suite(args) -> int:
    results = []
    for crit in CRITERIA:
        res = crit()
        results.append(res)
        print(res.line(), flush=True)
        if args.fail_fast and not res.passed:
            break
    if args.out:
        doc = _header(args, [])
        doc["criteria"] = [r.to_json() for r in results]
        write_atomic(args.out, json.dumps(doc, sort_keys=True, indent=1, default=str) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="node expansions for exact coloring search")
    common.add_argument("--close", action="store_true", help="apply point-closure")
    common.add_argument("--grid-step", type=float, default=None,
                        help="sample closure points on a grid instead of arrangement faces")
    common.add_argument("--approx-vertices", type=int, default=64,
                        help="polygon vertices used for curved boundaries")
    common.add_argument("--fail-fast", action="store_true")

    p = argparse.ArgumentParser(prog="pdcolor", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a scene")
    g.add_argument("--kind", required=True, choices=GENERATOR_KINDS)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--f-count", type=int, default=None, help="size of F for random kinds")
    g.add_argument("--epsilon", type=_fraction, default=None)
    g.add_argument("--base-polygon", default=None, help="JSON file with a 'vertices' list")
    g.add_argument("--radius-min", type=float, default=0.5)
    g.add_argument("--radius-max", type=float, default=2.0)
    g.set_defaults(func=cmd_gen)

    h = sub.add_parser("hypergraph", parents=[common], help="build the intersection hypergraph")
    h.add_argument("scene")
    h.set_defaults(func=cmd_hypergraph)

    for name, fn, text in (("color", cmd_color, "proper coloring"),
                           ("cfcolor", cmd_cfcolor, "conflict-free coloring")):
        c = sub.add_parser(name, parents=[common], help=text)
        c.add_argument("scene")
        c.add_argument("--hypergraph", default=None, help="precomputed hypergraph JSON")
        c.set_defaults(func=fn)

    v = sub.add_parser("verify", parents=[common], help="run all applicable checks")
    v.add_argument("scenes", nargs="+")
    v.add_argument("--coloring", default=None, help="check this coloring instead of computing one")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("stats", parents=[common], help="arrangement, census and palette table")
    s.add_argument("scenes", nargs="+")
    s.set_defaults(func=cmd_stats)

    r = sub.add_parser("svg", parents=[common], help="render a scene")
    r.add_argument("scene")
    r.add_argument("--coloring", default=None)
    r.add_argument("--size", type=int, default=600)
    r.add_argument("--no-faces", action="store_true", help="skip face shading")
    r.set_defaults(func=cmd_svg)

    u = sub.add_parser("suite", parents=[common], help="run the acceptance battery")
    u.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"pdcolor: error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
