import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from bracedpoly import census, combin, construct, gallery
from bracedpoly.errors import (CongruentError, DomainError, NotAFlexError, NotConnectedError,
                               NotConvexError, SuperpositionError)
from bracedpoly.linalg import (equilibrium_stresses, flex_residual, infinitesimal_flexes, is_proper_stress,
                               is_super_stable, is_trivial_motion, stress_signature)
from bracedpoly.model import BracedPolygonGraph, Framework, are_congruent, is_strictly_convex, lengths_equal

SQUARE = Framework(BracedPolygonGraph(4), [[0, 0], [1, 0], [1, 1], [0, 1]])
PENT = BracedPolygonGraph.from_labels(5, [(1, 3), (1, 4), (2, 5)])


def test_sampling_is_seeded_and_convex():
    a = construct.sample_strictly_convex(PENT, seed=11, count=100)
    b = construct.sample_strictly_convex(PENT, seed=11, count=100)
    assert all(np.array_equal(x.points, y.points) for x, y in zip(a, b))
    assert all(is_strictly_convex(f.points) and oracles.strictly_convex(f.points) for f in a)
    c = construct.sample_strictly_convex(PENT, seed=12, count=1)[0]
    assert not np.array_equal(a[0].points, c.points)


def test_square_mechanism_push_pull():
    v = infinitesimal_flexes(SQUARE)[0] * 0.1
    plus, minus = construct.push_pull(SQUARE, v)
    assert lengths_equal(plus, minus)
    assert not are_congruent(plus, minus)
    mid, flex = construct.reverse_average(plus, minus)
    assert np.allclose(mid.points, SQUARE.points, atol=1e-15)
    assert np.allclose(flex, v, atol=1e-15)


def test_push_pull_rejects_non_flex_and_trivial_pairs():
    with pytest.raises(NotAFlexError):
        construct.push_pull(SQUARE, np.ones((4, 2)) * [[1, 0], [0, 1], [0, 0], [0, 0]])
    with pytest.raises(NotAFlexError):
        construct.push_pull(SQUARE, np.zeros((4, 2)))
    shift = np.tile([0.3, -0.2], (4, 1))
    plus, minus = construct.push_pull(SQUARE, shift)
    assert are_congruent(plus, minus)
    with pytest.raises(CongruentError):
        construct.reverse_average(plus, minus)


def test_align_self_rotation():
    f1 = construct.sample_strictly_convex(PENT, seed=5)[0]
    c, s = math.cos(0.3), math.sin(0.3)
    f2 = f1.moved(f1.points @ np.array([[c, -s], [s, c]]).T)
    alpha = construct.align_rotation(f1, f2)
    assert math.remainder(alpha + 0.3, 2 * math.pi) == pytest.approx(0.0, abs=1e-12)
    mid = f1.moved((f1.points + construct._rotate(f2.points, alpha)) / 2)
    assert are_congruent(mid, f1)
    with pytest.raises(CongruentError):
        construct.aligned_average(f1, f2)


def test_align_needs_equal_lengths_and_convexity():
    f1 = construct.sample_strictly_convex(PENT, seed=1)[0]
    f2 = construct.sample_strictly_convex(PENT, seed=2)[0]
    with pytest.raises(DomainError):
        construct.align_rotation(f1, f2)
    dart = Framework(BracedPolygonGraph(4), [[0, 0], [2, 0], [1, 0.3], [1, 2]])
    with pytest.raises(NotConvexError):
        construct.align_rotation(dart, dart)


def test_naive_average_fails_where_aligned_average_works():
    # turning one member half way round makes the vertexwise average collapse
    a, b = gallery.twin_octagon_pair()
    c, s = math.cos(math.pi), math.sin(math.pi)
    b = b.moved(b.points @ np.array([[c, s], [-s, c]]).T)
    naive = (a.points + b.points) / 2
    assert not is_strictly_convex(naive)
    mid, flex, _ = construct.aligned_average(a, b)
    assert is_strictly_convex(mid.points)
    turned = b.moved(construct._rotate(b.points, construct.align_rotation(a, b)))
    assert np.all(construct.direction_gaps(a, turned) < math.pi)
    assert flex_residual(mid, flex) < 1e-10
    assert not is_trivial_motion(mid.points, flex)


def test_energy_term_anchor_conditions():
    for a, m, delta, omega in [(1.0, 6, 0.05, 0.3), (2.5, 14, 0.1, 0.001), (0.7, 9, 0.2, 4.0)]:
        f, g = construct.energy_functions(a, m, delta, omega)
        for t, w in ((f, omega), (g, -omega)):
            assert t.value(a)[0] == pytest.approx(1.0 / m, abs=1e-12)
            assert t.derivative(a)[0] == pytest.approx(w, abs=1e-12)
        assert f.value(a + delta)[0] > 1.0
        assert g.value(a - delta)[0] > 1.0
        xs = np.linspace(1e-6, 3 * a, 1000)
        assert np.all(np.diff(f.value(xs)) >= -1e-15)
        assert np.all(np.diff(g.value(xs)) <= 1e-15)


def test_energy_term_errors():
    with pytest.raises(DomainError):
        construct.energy_term(1.0, 6, 0.05, 0.0)
    with pytest.raises(DomainError):
        construct.energy_term(-1.0, 6, 0.05, 1.0)
    with pytest.raises(DomainError):
        construct.energy_term(0.1, 6, 0.5, -1.0)


def test_realize_k4_is_unit_square():
    r = construct.realize_properly_stressed(gallery.k4_square().graph)
    assert np.allclose(r.framework.points, [[0, 0], [1, 0], [1, 1], [0, 1]])
    assert np.allclose(r.stress, [1, 1, 1, 1, -1, -1])


def test_realize_pentagon_self_certifies():
    r = construct.realize_properly_stressed(PENT)
    fw = r.framework
    assert oracles.strictly_convex(fw.points)
    basis = oracles.stress_space(fw.points, PENT.edges)
    assert len(basis) == 1 and oracles.proper(5, basis[0])
    assert is_proper_stress(PENT, r.stress) and is_super_stable(fw, r.stress)


def test_realize_with_positive_brace():
    g = census.grunbaum_graph()
    b = (1, 5)
    r = construct.realize_properly_stressed(g, positive=[b])
    w = r.stress
    k = g.edge_index[b]
    assert w[k] > 0 and np.all(w[:g.n] > 0)
    assert np.all(np.delete(w[g.n:], k - g.n) < 0)


def test_realize_rejects_non_3_connected():
    with pytest.raises(NotConnectedError):
        construct.realize_properly_stressed(BracedPolygonGraph.from_labels(6, [(1, 3), (4, 6)]))
    with pytest.raises(NotConnectedError):
        construct.realize_properly_stressed(PENT, positive=[(0, 2)])


def test_superpose_single_part_identity():
    fw = construct.sample_strictly_convex(PENT, seed=0)[0]
    w = equilibrium_stresses(fw)[0]
    w = w * np.sign(w[0])
    cert = construct.superpose(fw.points, [construct.StressedPart(tuple(range(5)), PENT.edges, w)])
    assert cert.cancelled_edges == ()
    assert np.allclose(cert.stress, [w[list(PENT.edges).index(e)] for e in sorted(PENT.edges)])
    assert cert.super_stable


def test_superpose_rejects_small_overlap():
    pts = construct.sample_strictly_convex(8, seed=0)[0].points
    part = lambda vs: construct.StressedPart(vs, ((vs[0], vs[1]), (vs[1], vs[2]), (vs[2], vs[3]), (vs[0], vs[3]),
                                                  (vs[0], vs[2]), (vs[1], vs[3])), np.ones(6))
    with pytest.raises(SuperpositionError):
        construct.superpose(pts, [part((0, 1, 2, 3)), part((2, 3, 4, 5))], check_parts=False)


@pytest.mark.parametrize("n", [5, 6, 7, 8])
def test_plates_superpose_to_super_stable(n):
    g = gallery.plates(n)
    assert combin.is_generic_rigidity_circuit(g) and combin.is_3_connected(g)
    plan = census.find_superposition(g)
    assert plan is not None
    for fw in construct.sample_strictly_convex(g, seed=n, count=5):
        cert = plan.certify(fw.points)
        assert cert.super_stable
        assert all(abs(cert.total[e]) < 1e-9 * max(map(abs, cert.total.values()))
                   for e in cert.cancelled_edges)


def test_witness_k4_none_and_twin_octagon_valid():
    assert construct.find_nonglobal_witness(gallery.k4_square().graph, budget=300) is None
    w = construct.find_nonglobal_witness(gallery.twin_octagon_graph())
    assert w is not None and construct.witness_is_valid(w)
    assert is_strictly_convex(w.convex_side().points)


def test_twin_octagon_pair_both_convex():
    a, b = gallery.twin_octagon_pair()
    assert is_strictly_convex(a.points) and is_strictly_convex(b.points)
    assert lengths_equal(a, b, 1e-10) and not are_congruent(a, b)
    for f in (a, b):
        sig = stress_signature(f)
        assert sig.dim == 1 and sig.spectrum.rank == 5


def test_reflection_witness_on_two_cut():
    g = next(g for g in census.enumerate_circuits(7) if combin.two_vertex_cuts(g))
    fw = construct.sample_strictly_convex(g, seed=0)[0]
    w = construct.reflection_witness(fw)
    assert w is not None and construct.witness_is_valid(w)


@given(st.integers(0, 10**6))
def test_push_pull_reverse_average_round_trip(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 10))
    ch = oracles.chords(n)
    pick = rng.choice(len(ch), size=int(rng.integers(0, n - 3)), replace=False)
    g = BracedPolygonGraph(n, tuple(ch[i] for i in pick))
    fw = construct.sample_strictly_convex(g, seed=seed)[0]
    flexes = infinitesimal_flexes(fw)
    v = (rng.normal(size=len(flexes)) @ flexes.reshape(len(flexes), -1)).reshape(-1, 2)
    plus, minus = construct.push_pull(fw, v)
    lp = oracles.edge_lengths(plus.points, g.edges)
    lm = oracles.edge_lengths(minus.points, g.edges)
    assert np.max(np.abs(lp - lm) / lp) < 1e-10
    assert not oracles.congruent(plus.points, minus.points)
    mid, flex = construct.reverse_average(plus, minus)
    assert np.max(np.abs(flex - v)) < 1e-10
    assert np.max(np.abs(mid.points - fw.points)) < 1e-10
