import json
import os
import xml.etree.ElementTree as ET

import pytest

from bracedpoly.cli import main

FIX = os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")


def fixture(name):
    return os.path.join(FIX, name)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_k4(capsys):
    code, out, _ = run(capsys, "analyze", fixture("k4_square.json"))
    assert code == 0
    d = json.loads(out)
    assert d["rigidity"]["rank"] == 5 and d["rigidity"]["stress_dim"] == 1
    assert d["stress"]["signs"] == "++++--"
    assert d["proper"] and d["super_stable"] and d["strictly_convex"]


def test_usage_errors(capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "analyze")[0] == 2
    assert run(capsys, "analyze", fixture("k4_square.json"), "--nope")[0] == 2
    assert run(capsys, "classify")[0] == 2


def test_domain_errors_are_structured(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", str(tmp_path / "missing.json"))
    assert code == 1 and json.loads(err)["error"] == "DomainError"
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 5, "braces": [[1, 2]]}')
    code, _, err = run(capsys, "check", str(bad))
    assert code == 1 and "message" in json.loads(err)
    code, _, err = run(capsys, "analyze", fixture("twin_octagon_graph.json"))
    assert code == 1 and "coords" in json.loads(err)["message"]


def test_check_pentagon(capsys):
    code, out, _ = run(capsys, "check", fixture("pentagon.json"))
    assert code == 0
    d = json.loads(out)
    assert d["circuit"] and d["minimal"]["holds"] and d["uip"]["holds"]
    assert d["k_connected"] == {"holds": True, "k": 3}
    assert d["dual"]["checks"]["dual_3_connected"] == 1


def test_enumerate(capsys):
    code, out, _ = run(capsys, "enumerate", "--n", "6")
    assert code == 0 and len(out.splitlines()) == 7
    assert json.loads(out.splitlines()[0])["n"] == 6


def test_classify_census_is_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(capsys, "classify", "--n", "6", "--seed", "0", "--out", str(a))[0] == 0
    assert run(capsys, "classify", "--n", "6", "--seed", "0", "--out", str(b))[0] == 0
    data = (a / "census_n6.jsonl").read_bytes()
    assert data == (b / "census_n6.jsonl").read_bytes()
    code, out, _ = run(capsys, "report", str(a / "census_n6.jsonl"))
    assert code == 0 and json.loads(out)["circuits"] == 7


def test_classify_single_graph(capsys):
    code, out, _ = run(capsys, "classify", fixture("grunbaum.json"), "--samples", "5")
    assert code == 0
    d = json.loads(out)
    assert d["class"] == "UNKNOWN" and d["red_edges"] == [[2, 6], [4, 8]]


def test_render_pentagon(capsys, tmp_path):
    out_file = tmp_path / "out.svg"
    assert run(capsys, "render", fixture("pentagon.json"), "--svg", str(out_file))[0] == 0
    root = ET.parse(out_file).getroot()
    assert root.tag.endswith("svg")
    first = out_file.read_bytes()
    run(capsys, "render", fixture("pentagon.json"), "--svg", str(out_file))
    assert out_file.read_bytes() == first


def test_scan_csv_and_rows(capsys, tmp_path):
    path = tmp_path / "scan.csv"
    assert run(capsys, "scan", "--steps", "5", "--csv", str(path))[0] == 0
    assert len(path.read_text().splitlines()) == 6
    code, out, _ = run(capsys, "scan", "--rows")
    d = json.loads(out)
    assert d["concyclic"]["brace_signs"]["26"] == 0 and d["concyclic"]["brace_signs"]["48"] == 0
    assert d["parallel"]["signature"] == [0, 4, 4]


@pytest.mark.parametrize("verb,files,extra", [
    ("sample", ["pentagon.json"], ["--samples", "2"]),
    ("realize", ["pentagon.json"], []),
    ("witness", ["twin_octagon_graph.json"], []),
    ("push-pull", ["twin_octagon_flexible.json"], []),
])
def test_construct_verbs(capsys, verb, files, extra):
    code, out, _ = run(capsys, "construct", verb, *[fixture(f) for f in files], *extra)
    assert code == 0
    assert out.strip()
    json.loads(out)


def test_construct_average_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "construct", "push-pull", fixture("twin_octagon_flexible.json"))
    pair = json.loads(out)
    items = pair if isinstance(pair, list) else list(pair.values())
    paths = []
    for i, fw in enumerate(items[:2]):
        p = tmp_path / f"f{i}.json"
        p.write_text(json.dumps(fw))
        paths.append(str(p))
    code, out, _ = run(capsys, "construct", "average", *paths)
    assert code == 0 and "coords" in json.dumps(json.loads(out))
