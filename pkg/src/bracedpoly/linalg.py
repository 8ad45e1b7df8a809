"""Dense numerical rigidity analysis in the plane.

Every function takes anything with ``.points`` and ``.edges`` (a Framework or
a BarFramework).  Edge order is the order of ``.edges``; for a Framework that
is the graph's canonical order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConfigurationError, NotEquilibriumError
from .model import BracedPolygonGraph, points_of

TOL_RANK = 1e-9
TOL_PSD = 1e-8


def _edges(obj) -> np.ndarray:
    e = obj.edges
    if isinstance(e, tuple):
        e = np.array(e, dtype=np.intp).reshape(-1, 2)
    return np.asarray(e, dtype=np.intp)


def rigidity_matrix(framework) -> np.ndarray:
    """m x 2n matrix; row ij holds p_i - p_j in i's columns and p_j - p_i in j's."""
    p = points_of(framework)
    e = _edges(framework)
    n, m = p.shape[0], e.shape[0]
    R = np.zeros((m, 2 * n))
    d = p[e[:, 0]] - p[e[:, 1]]
    rows = np.arange(m)
    R[rows, 2 * e[:, 0]] = d[:, 0]
    R[rows, 2 * e[:, 0] + 1] = d[:, 1]
    R[rows, 2 * e[:, 1]] = -d[:, 0]
    R[rows, 2 * e[:, 1] + 1] = -d[:, 1]
    return R


def numerical_rank(matrix, tol_rank: float = TOL_RANK) -> int:
    a = np.asarray(matrix, dtype=float)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol_rank * s[0]))


def trivial_motions(points) -> np.ndarray:
    """Orthonormal basis (2n x 3) of translations and the infinitesimal rotation."""
    p = points_of(points)
    n = p.shape[0]
    t = np.zeros((2 * n, 3))
    t[0::2, 0] = 1.0
    t[1::2, 1] = 1.0
    c = p - p.mean(axis=0)
    t[0::2, 2] = -c[:, 1]
    t[1::2, 2] = c[:, 0]
    q, _ = np.linalg.qr(t)
    return q


def _spans_plane(p: np.ndarray, tol: float = 1e-9) -> bool:
    c = p - p.mean(axis=0)
    s = np.linalg.svd(c, compute_uv=False)
    return s.size >= 2 and s[0] > 0 and s[1] > tol * s[0]


@dataclass(frozen=True)
class RigidityReport:
    n: int
    m: int
    rank: int
    flex_dim: int
    stress_dim: int

    @property
    def is_inf_rigid(self) -> bool:
        return self.flex_dim == 0

    def as_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "rank": self.rank, "flex_dim": self.flex_dim,
                "stress_dim": self.stress_dim, "is_inf_rigid": self.is_inf_rigid}


def rigidity_report(framework, tol_rank: float = TOL_RANK) -> RigidityReport:
    p = points_of(framework)
    n = p.shape[0]
    R = rigidity_matrix(framework)
    r = numerical_rank(R, tol_rank)
    return RigidityReport(n, R.shape[0], r, 2 * n - 3 - r, R.shape[0] - r)


def _null_space(a: np.ndarray, tol_rank: float) -> np.ndarray:
    """Columns spanning the numerical kernel of a."""
    cols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(cols)
    u, s, vt = np.linalg.svd(a)
    if s.size == 0 or s[0] == 0.0:
        return np.eye(cols)
    r = int(np.sum(s > tol_rank * s[0]))
    return vt[r:].T.copy()


def infinitesimal_flexes(framework, tol_rank: float = TOL_RANK) -> np.ndarray:
    """Basis of the nontrivial flex space, shape (k, n, 2), orthogonal to trivial motions."""
    p = points_of(framework)
    if not _spans_plane(p):
        raise DegenerateConfigurationError("points do not span the plane")
    R = rigidity_matrix(framework)
    T = trivial_motions(p)
    # project the trivial motions out, then take the kernel
    proj = np.eye(2 * p.shape[0]) - T @ T.T
    scale = max(np.abs(R).max(), 1e-300)
    K = _null_space(np.vstack([R, scale * T.T]), tol_rank)
    K = proj @ K
    if K.shape[1] == 0:
        return np.zeros((0, p.shape[0], 2))
    q, _ = np.linalg.qr(K)
    return q.T.reshape(-1, p.shape[0], 2)


def flex_residual(framework, flex) -> float:
    """Largest |(p_i - p_j).(v_i - v_j)| relative to edge length times flex size."""
    p = points_of(framework)
    v = np.asarray(flex, dtype=float).reshape(p.shape)
    e = _edges(framework)
    d = p[e[:, 0]] - p[e[:, 1]]
    w = v[e[:, 0]] - v[e[:, 1]]
    scale = np.max(np.linalg.norm(d, axis=1)) * max(np.max(np.abs(v)), 1e-300)
    return float(np.max(np.abs(np.einsum("ij,ij->i", d, w)))) / scale


def is_trivial_motion(points, flex, tol: float = 1e-9) -> bool:
    p = points_of(points)
    v = np.asarray(flex, dtype=float).reshape(-1)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return True
    T = trivial_motions(p)
    return np.linalg.norm(v - T @ (T.T @ v)) <= tol * nv


def equilibrium_stresses(framework, tol_rank: float = TOL_RANK) -> np.ndarray:
    """Basis of the stress space (left kernel of R), shape (k, m), rows orthonormal."""
    R = rigidity_matrix(framework)
    return _null_space(R.T, tol_rank).T


def equilibrium_residual(framework, stress) -> float:
    """max |sum_j w_ij (p_i - p_j)| relative to max |w| times max edge length."""
    w = np.asarray(stress, dtype=float)
    R = rigidity_matrix(framework)
    scale = np.max(np.abs(w)) * max(np.abs(R).max(), 1e-300)
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(w @ R))) / scale


def stress_matrix(graph, stress, n: int | None = None) -> np.ndarray:
    """Omega with -w_ij off the diagonal on edges and zero row sums.

    ``graph`` may be a BracedPolygonGraph, a framework, or an (m, 2) edge array
    (then ``n`` is required).
    """
    if isinstance(graph, BracedPolygonGraph):
        e, n = graph.edge_array, graph.n
    elif hasattr(graph, "edges"):
        e, n = _edges(graph), graph.n
    else:
        e = np.asarray(graph, dtype=np.intp).reshape(-1, 2)
        if n is None:
            raise ValueError("n is required with a bare edge list")
    w = np.asarray(stress, dtype=float)
    if w.shape != (e.shape[0],):
        raise ValueError(f"stress has {w.shape} entries, graph has {e.shape[0]} edges")
    om = np.zeros((n, n))
    np.add.at(om, (e[:, 0], e[:, 1]), -w)
    np.add.at(om, (e[:, 1], e[:, 0]), -w)
    om[np.diag_indices(n)] = -om.sum(axis=1)
    return om


@dataclass(frozen=True)
class SpectralSignature:
    eigenvalues: tuple[float, ...]
    negative: int
    zero: int
    positive: int

    @property
    def rank(self) -> int:
        return self.negative + self.positive

    @property
    def is_psd(self) -> bool:
        return self.negative == 0

    def as_dict(self) -> dict:
        return {"eigenvalues": list(self.eigenvalues), "negative": self.negative,
                "zero": self.zero, "positive": self.positive}


def spectral_signature(omega, tol_psd: float = TOL_PSD) -> SpectralSignature:
    ev = np.linalg.eigvalsh(np.asarray(omega, dtype=float))
    scale = float(np.max(np.abs(ev))) if ev.size else 0.0
    cut = tol_psd * scale
    neg = int(np.sum(ev < -cut))
    pos = int(np.sum(ev > cut))
    return SpectralSignature(tuple(float(x) for x in ev), neg, len(ev) - neg - pos, pos)


def _brace_mask(graph: BracedPolygonGraph) -> np.ndarray:
    mask = np.zeros(graph.m, dtype=bool)
    mask[graph.n:] = True
    return mask


def is_proper_stress(graph, stress, tol: float = 1e-8) -> bool:
    """Positive on the boundary, negative on braces, after an optional global sign flip."""
    if not isinstance(graph, BracedPolygonGraph):
        graph = graph.graph
    w = np.asarray(stress, dtype=float)
    norm = float(np.max(np.abs(w))) if w.size else 0.0
    if norm == 0.0:
        return False
    br = _brace_mask(graph)
    cut = tol * norm
    for s in (1.0, -1.0):
        v = s * w
        if np.all(v[~br] > cut) and np.all(v[br] < -cut):
            return True
    return False


def direction_rank(framework, tol_rank: float = TOL_RANK) -> int:
    """Rank of the rows (dx², 2 dx dy, dy²) over unit edge directions."""
    p = points_of(framework)
    e = _edges(framework)
    d = p[e[:, 0]] - p[e[:, 1]]
    ln = np.linalg.norm(d, axis=1)
    d = d[ln > 0] / ln[ln > 0, None]
    rows = np.column_stack([d[:, 0] ** 2, 2 * d[:, 0] * d[:, 1], d[:, 1] ** 2])
    return numerical_rank(rows, tol_rank)


@dataclass(frozen=True)
class SuperStability:
    holds: bool
    signature: SpectralSignature
    direction_rank: int
    reason: str = ""

    def __bool__(self):
        return self.holds


def is_super_stable(framework, stress, tol_psd: float = TOL_PSD, tol_rank: float = TOL_RANK,
                    tol_equilibrium: float = 1e-8) -> SuperStability:
    """PSD stress matrix of rank n - 3 whose edge directions admit no affine flex."""
    p = points_of(framework)
    if not _spans_plane(p):
        raise DegenerateConfigurationError("points do not span the plane")
    res = equilibrium_residual(framework, stress)
    if res > tol_equilibrium:
        raise NotEquilibriumError(f"stress is not in equilibrium (residual {res:.3e})")
    om = stress_matrix(_edges(framework), stress, p.shape[0])
    sig = spectral_signature(om, tol_psd)
    dr = direction_rank(framework, tol_rank)
    n = p.shape[0]
    # the sign of a stress is a convention; PSD must hold for one of ±w
    if sig.positive == 0 and sig.negative > 0:
        sig = spectral_signature(-om, tol_psd)
    if not sig.is_psd:
        return SuperStability(False, sig, dr, f"{sig.negative} negative eigenvalue(s)")
    if sig.rank != n - 3:
        return SuperStability(False, sig, dr, f"stress matrix rank {sig.rank}, need {n - 3}")
    if dr < 3:
        return SuperStability(False, sig, dr, "edge directions lie on a conic at infinity")
    return SuperStability(True, sig, dr, "PSD of rank n-3, edge directions span")


@dataclass(frozen=True)
class StressSignature:
    basis: np.ndarray
    signs: tuple[str, ...] | None
    stress: np.ndarray | None
    spectrum: SpectralSignature | None

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def as_dict(self) -> dict:
        d = {"stress_dim": self.dim}
        if self.signs is not None:
            d["stress"] = [float(x) for x in self.stress]
            d["signs"] = "".join(self.signs)
            d["spectrum"] = self.spectrum.as_dict()
        return d


def normalize_stress(stress) -> np.ndarray:
    """Scale to max |w| = 1 with the first nonzero entry (first boundary edge) positive."""
    w = np.asarray(stress, dtype=float)
    mx = float(np.max(np.abs(w)))
    if mx == 0.0:
        return w.copy()
    nz = np.flatnonzero(np.abs(w) > 1e-12 * mx)
    return w / mx * np.sign(w[nz[0]])


def sign_pattern(stress, tol: float = 1e-8) -> tuple[str, ...]:
    w = np.asarray(stress, dtype=float)
    cut = tol * float(np.max(np.abs(w)))
    return tuple("+" if x > cut else "-" if x < -cut else "0" for x in w)


def stress_signature(framework, tol_rank: float = TOL_RANK, tol_psd: float = TOL_PSD,
                     tol_sign: float = 1e-8) -> StressSignature:
    """Stress basis, and for a 1-dimensional stress space its sign pattern and Omega spectrum."""
    basis = equilibrium_stresses(framework, tol_rank)
    if basis.shape[0] != 1:
        return StressSignature(basis, None, None, None)
    w = normalize_stress(basis[0])
    om = stress_matrix(_edges(framework), w, points_of(framework).shape[0])
    return StressSignature(basis, sign_pattern(w, tol_sign), w, spectral_signature(om, tol_psd))


def smallest_singular_ratio(framework) -> float:
    """sigma_(2n-3) / sigma_max of R: zero exactly when a nontrivial flex exists."""
    p = points_of(framework)
    R = rigidity_matrix(framework)
    s = np.linalg.svd(R, compute_uv=False)
    k = 2 * p.shape[0] - 3
    if s.size < k or s[0] == 0.0:
        return 0.0
    return float(s[k - 1] / s[0])
