import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from bracedpoly import census, gallery
from bracedpoly.construct import sample_strictly_convex
from bracedpoly.errors import DegenerateConfigurationError, NotEquilibriumError
from bracedpoly.linalg import (equilibrium_residual, equilibrium_stresses, infinitesimal_flexes,
                               is_proper_stress, is_super_stable, numerical_rank, rigidity_matrix,
                               rigidity_report, sign_pattern, spectral_signature, stress_matrix,
                               stress_signature, trivial_motions)
from bracedpoly.model import BarFramework, BracedPolygonGraph, Framework

K4_STRESS = np.array([1, 1, 1, 1, -1, -1], dtype=float)


def test_single_edge_row():
    R = rigidity_matrix(BarFramework([[0, 0], [1, 0]], [(0, 1)]))
    assert R.tolist() == [[-1.0, 0.0, 1.0, 0.0]]


def test_rigidity_matrix_matches_oracle():
    fw = sample_strictly_convex(census.grunbaum_graph(), seed=3)[0]
    assert np.array_equal(rigidity_matrix(fw), oracles.rigidity_matrix(fw.points, fw.graph.edges))


def test_numerical_rank_examples():
    assert numerical_rank(np.eye(3)) == 3
    assert numerical_rank(np.outer([1, 2, 3], [4, 5])) == 1
    assert numerical_rank(np.zeros((3, 3))) == 0


def test_k4_square_report():
    fw = gallery.k4_square()
    rep = rigidity_report(fw)
    assert (rep.rank, rep.flex_dim, rep.stress_dim, rep.is_inf_rigid) == (5, 0, 1, True)
    basis = equilibrium_stresses(fw)
    assert basis.shape == (1, 6)
    w = basis[0] / basis[0][0]
    assert np.allclose(w, K4_STRESS)


def test_k4_stress_matrix():
    om = stress_matrix(gallery.k4_square().graph, K4_STRESS)
    v = np.array([1, -1, 1, -1])
    assert np.array_equal(om, np.outer(v, v))
    assert np.allclose(np.linalg.eigvalsh(om), [0, 0, 0, 4])
    assert not stress_matrix(gallery.k4_square().graph, np.zeros(6)).any()


def test_k4_proper_and_super_stable():
    fw = gallery.k4_square()
    assert is_proper_stress(fw.graph, K4_STRESS)
    assert is_proper_stress(fw.graph, -K4_STRESS)
    ss = is_super_stable(fw, K4_STRESS)
    assert ss and ss.signature.rank == 1
    assert stress_signature(fw).signs == ("+",) * 4 + ("-",) * 2


def test_triangle_and_square():
    tri = Framework(BracedPolygonGraph(3), [[0, 0], [1, 0], [0, 1]])
    assert infinitesimal_flexes(tri).shape[0] == 0
    assert equilibrium_stresses(tri).shape[0] == 0
    sq = Framework(BracedPolygonGraph(4), [[0, 0], [1, 0], [1, 1], [0, 1]])
    assert infinitesimal_flexes(sq).shape[0] == 1


def test_collinear_rejected():
    line = Framework(BracedPolygonGraph(4), [[0, 0], [1, 0], [2, 0], [3, 0]])
    with pytest.raises(DegenerateConfigurationError):
        infinitesimal_flexes(line)


def test_super_stable_needs_equilibrium():
    with pytest.raises(NotEquilibriumError):
        is_super_stable(gallery.k4_square(), [1, 1, 1, 1, -1, 0.5])


def test_lens_stress_not_proper():
    fw = gallery.lens()
    sig = stress_signature(fw)
    assert sig.dim == 1
    k = fw.graph.edge_index[(1, 6)]
    assert sig.signs[k] == "0"
    assert not is_proper_stress(fw.graph, sig.stress)
    assert len(oracles.stress_space(fw.points, fw.graph.edges)) == 1


def test_grunbaum_signatures():
    rows = census.grunbaum_rows()
    e = census.grunbaum_family(rows["parallel"])
    w = census.grunbaum_stress(rows["parallel"])
    ss = is_super_stable(e, w)
    assert not ss and ss.signature.negative == 0 and ss.signature.rank == 4
    i = census.grunbaum_family(rows["unstressed_67"])
    ss = is_super_stable(i, census.grunbaum_stress(rows["unstressed_67"]))
    assert not ss and ss.signature.negative == 1


def test_spectral_signature_counts():
    sig = spectral_signature(np.diag([-2.0, 0.0, 1e-12, 3.0]))
    assert (sig.negative, sig.zero, sig.positive) == (1, 2, 1)
    assert sig.negative + sig.zero + sig.positive == 4


def test_sign_pattern():
    assert sign_pattern([1.0, -1e-12, -0.5]) == ("+", "0", "-")


# ---------------------------------------------------------------- properties

_graphs = [g for n in (4, 5, 6, 7) for g in census.enumerate_circuits(n)]


@given(st.integers(0, len(_graphs) - 1), st.integers(0, 10_000))
def test_trivial_motions_in_kernel_and_stress_identities(k, seed):
    g = _graphs[k]
    fw = sample_strictly_convex(g, seed=seed)[0]
    R = rigidity_matrix(fw)
    T = trivial_motions(fw.points)
    assert np.max(np.abs(R @ T)) < 1e-12 * g.m
    rep = rigidity_report(fw)
    assert rep.rank == oracles.rank(oracles.rigidity_matrix(fw.points, g.edges))
    assert rep.stress_dim == g.m - rep.rank
    assert rep.flex_dim == 2 * g.n - 3 - rep.rank
    for w in equilibrium_stresses(fw):
        assert equilibrium_residual(fw, w) < 1e-9
        om = stress_matrix(g, w)
        assert np.allclose(om, om.T)
        X = np.column_stack([np.ones(g.n), fw.points])
        assert np.max(np.abs(om @ X)) < 1e-9 * max(1.0, np.abs(w).max())
        assert np.allclose(om, oracles.stress_matrix(g.n, g.edges, w))
        assert spectral_signature(om).rank <= min(g.n - 3, int(np.sum(np.abs(w) > 1e-9 * np.abs(w).max())))


@given(st.integers(0, len(_graphs) - 1), st.integers(0, 10_000))
def test_nonpositive_braces_force_positive_boundary(k, seed):
    g = _graphs[k]
    fw = sample_strictly_convex(g, seed=seed)[0]
    basis = equilibrium_stresses(fw)
    if basis.shape[0] != 1:
        return
    w = basis[0] / np.max(np.abs(basis[0]))
    for s in (1, -1):
        v = s * w
        if np.all(v[g.n:] <= 1e-9) and np.any(np.abs(v) > 1e-9):
            assert np.all(v[:g.n] > 0)


@given(st.integers(0, len(_graphs) - 1), st.integers(0, 10_000))
def test_flex_basis_satisfies_edge_equations(k, seed):
    # a circuit minus two braces has 2n - 4 edges, so it always flexes
    g = _graphs[k].without_braces(_graphs[k].braces[:2])
    fw = sample_strictly_convex(g, seed=seed)[0]
    R = rigidity_matrix(fw)
    flexes = infinitesimal_flexes(fw)
    assert flexes.shape[0] >= 1
    T = trivial_motions(fw.points)
    for v in flexes:
        assert np.max(np.abs(R @ v.reshape(-1))) < 1e-9 * np.abs(R).max()
        assert np.max(np.abs(T.T @ v.reshape(-1))) < 1e-9
