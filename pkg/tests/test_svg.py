import xml.etree.ElementTree as ET

import numpy as np
from hypothesis import given, strategies as st

from bracedpoly import census, gallery
from bracedpoly.construct import sample_strictly_convex
from bracedpoly.svg import RenderStyle, render_svg

NS = "{http://www.w3.org/2000/svg}"
K4_STRESS = np.array([1, 1, 1, 1, -1, -1], dtype=float)


def _lines(text):
    root = ET.fromstring(text)
    return {el.find(NS + "title").text: el.attrib for el in root.iter(NS + "line")}


def test_k4_boundary_dashed_diagonals_solid():
    text = render_svg(gallery.k4_square(), K4_STRESS)
    lines = _lines(text)
    st = RenderStyle()
    for e in ("1-2", "2-3", "3-4", "1-4"):
        assert lines[e]["stroke-dasharray"] == st.dash
        assert lines[e]["stroke"] == st.boundary
    for e in ("1-3", "2-4"):
        assert "stroke-dasharray" not in lines[e]
        assert lines[e]["stroke"] == st.brace


def test_no_stress_all_gray():
    lines = _lines(render_svg(gallery.pentagon()))
    assert len(lines) == 8
    assert {a["stroke"] for a in lines.values()} == {RenderStyle().neutral}
    assert all("stroke-dasharray" not in a for a in lines.values())


def test_concyclic_omits_zero_stress_braces():
    t = census.grunbaum_rows()["concyclic"]
    fw = census.grunbaum_family(t)
    lines = _lines(render_svg(fw, census.grunbaum_stress(t), style=RenderStyle(sign_tol=1e-6)))
    assert "4-8" not in lines and "2-6" not in lines
    assert len(lines) == fw.graph.m - 2


def test_red_edges_coloured():
    fw = census.grunbaum_family(census.grunbaum_rows()["parallel"])
    red = census.red_edge_analysis(fw.graph)
    lines = _lines(render_svg(fw, census.grunbaum_stress(census.grunbaum_rows()["parallel"]), red))
    assert {e for e, a in lines.items() if a["stroke"] == RenderStyle().red} == {"2-6", "4-8"}


def test_labels_and_canvas():
    root = ET.fromstring(render_svg(gallery.pentagon()))
    assert root.attrib["width"] == "600" and root.attrib["viewBox"] == "0 0 600 600"
    assert [t.text for t in root.iter(NS + "text")] == ["1", "2", "3", "4", "5"]


@given(st.integers(4, 10), st.integers(0, 10**5))
def test_fits_margin_and_is_deterministic(n, seed):
    fw = sample_strictly_convex(n, seed=seed)[0]
    text = render_svg(fw)
    assert text == render_svg(fw)
    root = ET.fromstring(text)
    xs = [float(c.attrib["cx"]) for c in root.iter(NS + "circle")]
    ys = [float(c.attrib["cy"]) for c in root.iter(NS + "circle")]
    assert min(xs + ys) >= 30 - 1e-6 and max(xs + ys) <= 570 + 1e-6
    assert abs(max(max(xs) - min(xs), max(ys) - min(ys)) - 540) < 1e-5
