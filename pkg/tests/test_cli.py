import csv
import hashlib
import json

import pytest

from pdcolor.cli import STATS_FIELDS, main
from pdcolor.coloring import Coloring
from pdcolor.geom import Disk, PointMass, Scene
from pdcolor.hypergraph import IntersectionHypergraph, build_intersection_hypergraph
from pdcolor.verify import check_conflict_free, check_proper


def run(*argv):
    return main([str(a) for a in argv])


def read_json(path):
    return json.loads(path.read_text())


def write_scene(path, scene):
    path.write_text(json.dumps({"scene": scene.to_json()}))
    return path


@pytest.fixture
def ears(tmp_path):
    out = tmp_path / "ears.json"
    assert run("gen", "--kind", "bear_ears", "--n", 4, "--out", out) == 0
    return out


def test_gen_then_verify_bear_ears(ears, tmp_path):
    scene = Scene.from_json(read_json(ears)["scene"])
    assert len(scene.B) == 4 and len(scene.F) == 6
    report = tmp_path / "v.jsonl"
    assert run("verify", ears, "--out", report) == 0
    lines = [json.loads(x) for x in report.read_text().splitlines()]
    claims = {r["claim"]: r for r in lines[1:]}
    assert claims["bear_ears_complete_graph"]["passed"]
    assert claims["proper"]["passed"]
    assert all(r["passed"] for r in lines[1:])


def test_verify_does_not_enforce_pseudo_disk_claims_on_ears(tmp_path):
    scene = tmp_path / "ears6.json"
    run("gen", "--kind", "bear_ears", "--n", 6, "--out", scene)
    report = tmp_path / "v.jsonl"
    assert run("verify", scene, "--out", report) == 0
    claims = {r["claim"]: r for r in map(json.loads, report.read_text().splitlines()[1:])}
    assert claims["bear_ears_complete_graph"]["passed"]
    # K6 is not planar, which is the point of the construction
    assert not claims["delaunay_planar"]["passed"]
    assert claims["delaunay_planar"]["informational"]
    assert "informational" not in claims["proper"]


def test_color_single_hyperedge(tmp_path):
    scene = Scene((Disk(0, (0, 0), 1), Disk(1, (3, 0), 1)), (Disk(2, ("3/2", 0), 2),))
    path = write_scene(tmp_path / "s.json", scene)
    out = tmp_path / "c.json"
    assert run("color", path, "--out", out) == 0
    col = Coloring.from_json(read_json(out))
    assert col.palette_size == 2


def test_cfcolor_64_disks(tmp_path):
    scene_path = tmp_path / "s.json"
    assert run("gen", "--kind", "random_disks", "--n", 64, "--seed", 1, "--out", scene_path) == 0
    out = tmp_path / "cf.json"
    assert run("cfcolor", scene_path, "--out", out) == 0
    col = Coloring.from_json(read_json(out))
    assert col.palette_size <= 16
    scene = Scene.from_json(read_json(scene_path)["scene"])
    assert check_conflict_free(build_intersection_hypergraph(scene), col).passed
    # verify accepts the conflict-free coloring as such
    assert run("verify", scene_path, "--coloring", out, "--out", tmp_path / "v.jsonl") == 0


def test_hypergraph_command_round_trips(ears, tmp_path):
    out = tmp_path / "h.json"
    assert run("hypergraph", ears, "--out", out) == 0
    hg = IntersectionHypergraph.from_json(read_json(out)["hypergraph"])
    assert len(hg) == 6
    col_out = tmp_path / "c.json"
    assert run("color", ears, "--hypergraph", out, "--out", col_out) == 0
    assert check_proper(hg, Coloring.from_json(read_json(col_out))).passed


def test_malformed_input_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("color", bad) == 2
    assert "error" in capsys.readouterr().err
    assert run("color", tmp_path / "missing.json") == 2
    with pytest.raises(SystemExit) as exc:
        run("gen", "--kind", "spirals", "--n", 3)
    assert exc.value.code == 2


def test_budget_exhaustion_exits_4(tmp_path):
    scene_path = tmp_path / "s.json"
    run("gen", "--kind", "random_disks", "--n", 20, "--out", scene_path)
    out = tmp_path / "c.json"
    assert run("color", scene_path, "--close", "--budget", 1, "--out", out) == 4
    doc = read_json(out)
    assert doc["method"] == "greedy_fallback(budget)"


def test_verify_failure_exits_3(tmp_path):
    scene = Scene((Disk(0, (0, 0), 1), Disk(1, (3, 0), 1)), (Disk(2, ("3/2", 0), 2),))
    path = write_scene(tmp_path / "s.json", scene)
    bad = tmp_path / "c.json"
    bad.write_text(json.dumps(Coloring.from_colors([0, 0]).to_json()))
    assert run("verify", path, "--coloring", bad, "--out", tmp_path / "v.jsonl") == 3


def test_reruns_are_byte_identical(tmp_path):
    out = tmp_path / "c.json"
    seen = []
    for _ in range(2):
        run("gen", "--kind", "homothets", "--n", 6, "--seed", 3, "--out", tmp_path / "s.json")
        run("color", tmp_path / "s.json", "--close", "--out", out)
        seen.append(out.read_bytes())
    assert seen[0] == seen[1]


def test_header_records_config_and_input_hashes(ears, tmp_path):
    out = tmp_path / "c.json"
    run("color", ears, "--seed", 5, "--out", out)
    doc = read_json(out)
    assert doc["config"]["seed"] == 5
    assert doc["config"]["command"] == "color"
    assert doc["inputs"][str(ears)] == hashlib.sha256(ears.read_bytes()).hexdigest()


def test_stats_csv(ears, tmp_path):
    pts = Scene((PointMass(0, (0, 0)), PointMass(1, (1, 0))), (Disk(2, ("1/2", 0), 1),))
    p2 = write_scene(tmp_path / "p.json", pts)
    out = tmp_path / "stats.csv"
    assert run("stats", ears, p2, "--out", out) == 0
    text = out.read_text().splitlines()
    assert text[0].startswith("# ")
    rows = list(csv.DictReader(text[1:]))
    assert list(rows[0]) == STATS_FIELDS
    assert rows[0]["hyperedges"] == "6" and rows[0]["census_2"] == "6"
    assert rows[1]["hyperedges"] == "1" and rows[1]["palette"] == "2"


def test_svg(ears, tmp_path):
    col = tmp_path / "c.json"
    run("color", ears, "--out", col)
    out = tmp_path / "s.svg"
    assert run("svg", ears, "--coloring", col, "--out", out) == 0
    text = out.read_text()
    assert text.startswith("<svg") and text.rstrip().endswith("</svg>")
    assert "<!--" in text
