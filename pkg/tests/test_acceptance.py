"""Acceptance criteria 1-9.  Each test records a one-line detail; conftest prints a PASS/FAIL table."""
import math
import os
import subprocess
import sys

import numpy as np
import pytest

import oracles
from conftest import ACCEPTANCE
from bracedpoly import census, combin, construct, gallery
from bracedpoly.errors import GraphError
from bracedpoly.linalg import (equilibrium_stresses, infinitesimal_flexes, is_proper_stress, is_super_stable,
                               spectral_signature, stress_matrix, stress_signature)
from bracedpoly.model import BracedPolygonGraph, Framework
from bracedpoly.svg import render_svg

TOL_GEOM = 1e-9
TOL_RANK = 1e-9
TOL_PSD = 1e-8
LENGTH_TOL = 1e-10
ZERO_BRACE_TOL = 1e-6
N7_CLASSES = {"PROPER_ALWAYS": 5, "SUPER_STABLE_ALWAYS": 29, "CONVEXLY_RIGID_NOT_GLOBAL": 10,
              "NOT_CONVEXLY_RIGID": 0, "UNKNOWN": 0}
ROOT = os.path.join(os.path.dirname(__file__), os.pardir)


def criterion(num, title):
    def wrap(fn):
        ACCEPTANCE[fn.__name__] = (num, title)
        return fn
    return wrap


def circuits(lo=4, hi=8):
    return [g for n in range(lo, hi + 1) for g in census.enumerate_circuits(n)]


def flexible_framework(rng, seed):
    """Random strictly convex framework with at least one nontrivial flex."""
    n = int(rng.integers(4, 11))
    ch = oracles.chords(n)
    k = int(rng.integers(0, n - 3))
    pick = rng.choice(len(ch), size=k, replace=False)
    g = BracedPolygonGraph(n, tuple(ch[i] for i in pick))
    fw = construct.sample_strictly_convex(g, seed=seed)[0]
    flexes = infinitesimal_flexes(fw)
    v = (rng.normal(size=len(flexes)) @ flexes.reshape(len(flexes), -1)).reshape(-1, 2)
    return fw, v


def turn_directions(p):
    e = np.roll(p, -1, axis=0) - p
    return np.arctan2(e[:, 1], e[:, 0])


@criterion(1, "push-pull gives equal lengths, non-congruent pair, reverse average recovers the flex")
def test_push_pull_identity_on_1000_frameworks(record_property):
    rng = np.random.default_rng(2024)
    worst_len = worst_flex = worst_mid = 0.0
    congruent = 0
    for seed in range(1000):
        fw, v = flexible_framework(rng, seed)
        plus, minus = construct.push_pull(fw, v)
        lp = oracles.edge_lengths(plus.points, fw.graph.edges)
        lm = oracles.edge_lengths(minus.points, fw.graph.edges)
        worst_len = max(worst_len, float(np.max(np.abs(lp - lm) / lp)))
        congruent += oracles.congruent(plus.points, minus.points)
        mid, flex = construct.reverse_average(plus, minus)
        worst_flex = max(worst_flex, float(np.max(np.abs(flex - v)) / np.max(np.abs(v))))
        worst_mid = max(worst_mid, float(np.max(np.abs(mid.points - fw.points))))
    record_property("detail", f"max length gap {worst_len:.1e}, flex residual {worst_flex:.1e}, "
                              f"congruent pairs {congruent}/1000")
    assert worst_len < LENGTH_TOL
    assert worst_flex < LENGTH_TOL and worst_mid < LENGTH_TOL
    assert congruent == 0


@criterion(2, "aligned averaging of equal-length strictly convex pairs stays strictly convex")
def test_aligned_average_on_1000_pairs(record_property):
    rng = np.random.default_rng(7)
    ok = 0
    worst_gap = 0.0
    for seed in range(1000):
        fw, v = flexible_framework(rng, seed)
        a, b = construct.push_pull_scaled(fw, v, scale=float(rng.uniform(0.02, 0.3)))
        assert oracles.strictly_convex(a.points) and oracles.strictly_convex(b.points)
        # hand the second polygon over at an arbitrary orientation
        turn = float(rng.uniform(0, 2 * math.pi))
        c, s = math.cos(turn), math.sin(turn)
        b = b.moved(b.points @ np.array([[c, s], [-s, c]]))
        alpha = construct.align_rotation(a, b)
        c, s = math.cos(alpha), math.sin(alpha)
        q = b.points @ np.array([[c, s], [-s, c]])
        gaps = np.abs(np.angle(np.exp(1j * (turn_directions(a.points) - turn_directions(q)))))
        worst_gap = max(worst_gap, float(gaps.max()))
        mid = (a.points + q) / 2
        if np.all(gaps < math.pi - 1e-12) and oracles.strictly_convex(mid):
            ok += 1
    record_property("detail", f"{ok}/1000 strictly convex midpoints, largest direction gap {worst_gap:.3f} rad")
    assert ok == 1000


@criterion(3, "minimal 3-connectivity agrees with the unique interval property on every circuit n<=8")
def test_m3c_equals_uip_exhaustive(record_property):
    gs = circuits()
    bad = [g for g in gs if combin.is_minimally_3_connected(g) != bool(combin.unique_interval_property(g))]
    oracle_bad = [g for g in gs if oracles.minimally_3_connected(g.n, g.braces) != combin.is_minimally_3_connected(g)]
    record_property("detail", f"{len(gs)} circuits, {len(bad)} disagreements, {len(oracle_bad)} oracle mismatches")
    assert not bad and not oracle_bad


@criterion(4, "minimally 3-connected circuits always properly stressed (200 samples each)")
def test_m3c_circuits_properly_stressed(record_property):
    m3c = [g for g in circuits() if combin.is_minimally_3_connected(g)]
    good = total = 0
    for g in m3c:
        for fw in construct.sample_strictly_convex(g, seed=g.n, count=200):
            total += 1
            basis = oracles.stress_space(fw.points, g.edges, TOL_RANK)
            if len(basis) == 1 and oracles.proper(g.n, basis[0]) and is_proper_stress(g, basis[0]):
                good += 1
    record_property("detail", f"{len(m3c)} graphs, {good}/{total} samples with a 1-dim proper stress")
    assert good == total


@criterion(4, "every other circuit has a strictly convex placement with a vanishing brace stress")
def test_non_m3c_circuits_have_zero_brace(record_property):
    others = [g for g in circuits() if not combin.is_minimally_3_connected(g)]
    done, missing = 0, []
    for g in others:
        try:
            r = census.zero_brace_realization(g)
        except GraphError:
            missing.append(g)
            continue
        p = r.framework.points
        w = r.stress
        assert oracles.strictly_convex(p)
        assert np.max(np.abs(stress_matrix(g, w) @ np.column_stack([np.ones(g.n), p]))) < 1e-8
        if np.min(np.abs(w[g.n:])) < ZERO_BRACE_TOL * np.max(np.abs(w)):
            done += 1
        else:
            missing.append(g)
    two_cut = sum(not combin.is_3_connected(g) for g in missing)
    record_property("detail", f"{done}/{len(others)} constructed; {len(missing)} without one "
                              f"({two_cut} have a 2-vertex cut, brace stress only tends to 0 as the polygon flattens)")
    assert not missing


@criterion(5, "realize_properly_stressed certifies every 3-connected graph n<=8")
def test_realize_every_3_connected_graph(record_property):
    total = failed = 0
    for n in range(4, 9):
        for g in census.enumerate_graphs(n):
            total += 1
            r = construct.realize_properly_stressed(g)
            fw, w = r.framework, r.stress
            ss = is_super_stable(fw, w, tol_psd=TOL_PSD, tol_rank=TOL_RANK)
            om = oracles.stress_matrix(n, g.edges, w)
            ok = (oracles.strictly_convex(fw.points) and oracles.proper(n, w)
                  and is_proper_stress(g, w) and bool(ss)
                  and oracles.inertia(om, TOL_PSD) == (0, 3, n - 3))
            failed += not ok
    record_property("detail", f"{total - failed}/{total} graphs certified")
    assert failed == 0


@criterion(6, "anchor values: twin octagon rank 5, K4 rank 1, octagon family regimes")
def test_anchor_values(record_property):
    notes = []
    for fw in gallery.twin_octagon_pair():
        sig = stress_signature(fw)
        assert sig.dim == 1 and sig.spectrum.rank == 5
        assert oracles.inertia(oracles.stress_matrix(8, fw.graph.edges, sig.stress))[1] == 3
    notes.append("twin octagon rank 5")

    k4 = gallery.k4_square()
    w = oracles.stress_space(k4.points, k4.graph.edges)[0]
    ss = is_super_stable(k4, w)
    assert ss and ss.signature.rank == 1
    assert np.linalg.matrix_rank(oracles.stress_matrix(4, k4.graph.edges, w)) == 1
    notes.append("K4 rank 1")

    g = census.grunbaum_graph()
    rows = census.grunbaum_rows()
    we = census.grunbaum_stress(rows["parallel"])
    sig = spectral_signature(stress_matrix(g, we), TOL_PSD)
    assert (sig.negative, sig.rank) == (0, 4)
    assert oracles.inertia(oracles.stress_matrix(8, g.edges, we)) == (0, 4, 4)
    notes.append("parallel placement PSD rank 4")

    wc = census.grunbaum_stress(rows["concyclic"])
    scale = np.max(np.abs(wc))
    z84, z62 = abs(wc[g.edge_index[(3, 7)]]) / scale, abs(wc[g.edge_index[(1, 5)]]) / scale
    assert z84 < 1e-6 and z62 < 1e-6
    others = [wc[g.edge_index[b]] for b in g.braces if b not in ((3, 7), (1, 5))]
    assert all(x < 0 for x in others)
    notes.append(f"concyclic |w84|,|w62| {max(z84, z62):.0e}")

    th = census.grunbaum_thresholds()
    eps = 1e-3
    for t, neg, convex in [(th["parallel"] - eps, 0, True), (th["parallel"] + eps, 1, True),
                           (th["flat_8"] - eps, 1, True), (th["flat_8"] + eps, 1, False)]:
        row = census.grunbaum_row(t)
        assert row.negative == neg and row.strictly_convex == convex
        om = oracles.stress_matrix(8, g.edges, row.stress)
        assert oracles.inertia(om)[0] == neg
    notes.append("one negative eigenvalue past the parallel placement, convexity lost past the right-angle circle")
    record_property("detail", "; ".join(notes))


@criterion(7, "census: n=7 partition, n=8 proper list, octagon graph UNKNOWN with red edges")
def test_census_consistency(record_property, tmp_path):
    rep = census.census_report(7, out_dir=str(tmp_path), seed=0)
    assert len(rep.records) == len(census.enumerate_circuits(7))
    assert rep.counts == N7_CLASSES
    for r in rep.records:
        if r.label == census.CONVEXLY_RIGID_NOT_GLOBAL:
            w = r.evidence["witness"]
            side = w["plus"] if w["strictly_convex_side"] == "plus" else w["minus"]
            assert oracles.strictly_convex(np.array(side))

    eight = census.enumerate_circuits(8)
    m3c_lib = {g.braces for g in eight if combin.is_minimally_3_connected(g)}
    m3c_oracle = {g.braces for g in eight if oracles.minimally_3_connected(8, g.braces)}
    proper = {g.braces for g in eight if g.braces in m3c_lib
              and census.classify(g).label == census.PROPER_ALWAYS}
    assert proper == m3c_lib == m3c_oracle
    # no other record may carry the label
    other = next(g for g in eight if g.braces not in m3c_lib)
    with pytest.raises(ValueError):
        census.ClassificationRecord(other, True, True, False, False, census.PROPER_ALWAYS, "theorem")

    gr = census.classify(census.grunbaum_graph())
    assert gr.label == census.UNKNOWN
    assert gr.as_dict()["red_edges"] == [[2, 6], [4, 8]]
    record_property("detail", f"n=7 {rep.counts['PROPER_ALWAYS']}/{rep.counts['SUPER_STABLE_ALWAYS']}/"
                              f"{rep.counts['CONVEXLY_RIGID_NOT_GLOBAL']} of {len(rep.records)}, "
                              f"n=8 proper {len(proper)}, "
                              f"octagon UNKNOWN red 26 48")


@criterion(8, "dual polygon facts hold on every minimally 3-connected circuit n<=8")
def test_dual_invariant_suite(record_property):
    m3c = [g for g in circuits() if combin.is_minimally_3_connected(g)]
    violations = []
    for g in m3c:
        rep = combin.dual_invariant_suite(g)
        violations += rep.violations
        d = combin.dual_polygon(g).graph
        if oracles.connectivity(d.n, d.braces) < 3:
            violations.append(f"{g}: dual not 3-connected")
    record_property("detail", f"{len(m3c)} graphs, {len(violations)} violations")
    assert not violations


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "bracedpoly.cli", *argv], capture_output=True, check=True)


@criterion(9, "identical seeds and flags give byte-identical census and SVG files")
def test_byte_determinism(record_property, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    _cli("classify", "--n", "6", "--seed", "0", "--out", str(a))
    _cli("classify", "--n", "6", "--seed", "0", "--out", str(b))
    same_census = (a / "census_n6.jsonl").read_bytes() == (b / "census_n6.jsonl").read_bytes()
    fix = os.path.join(ROOT, "fixtures")
    svgs = []
    for k in range(2):
        out = tmp_path / f"g{k}.svg"
        _cli("render", os.path.join(fix, "grunbaum_row_e.json"), "--red", "--svg", str(out))
        svgs.append(out.read_bytes())
    fw = construct.sample_strictly_convex(census.enumerate_circuits(7)[3], seed=5)[0]
    same_lib = render_svg(fw, equilibrium_stresses(fw)[0]) == render_svg(
        Framework(fw.graph, fw.points.copy()), equilibrium_stresses(fw)[0])
    record_property("detail", f"census {'identical' if same_census else 'differs'}, "
                              f"svg {'identical' if svgs[0] == svgs[1] else 'differs'}")
    assert same_census and svgs[0] == svgs[1] and same_lib
