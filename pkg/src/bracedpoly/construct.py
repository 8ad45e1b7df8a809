"""Geometric constructions on braced polygons.

push-pull doubling of a flex, averaging two equal-length realizations,
rotation alignment, stress superposition, energy-based realization of a
properly stressed strictly convex framework, non-global-rigidity witnesses
and random strictly convex samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from . import kernels
from .combin import (ConstructionSequence, construction_sequence, is_3_connected,
                     spanning_minimal_subgraph, two_vertex_cuts)
from .errors import (CongruentError, ConvergenceError, DomainError, GraphMismatchError,
                     NotAFlexError, NotConnectedError, NotConvexError, NotEquilibriumError,
                     SuperpositionError)
from .linalg import (TOL_PSD, TOL_RANK, equilibrium_residual, flex_residual, infinitesimal_flexes,
                     is_proper_stress, is_super_stable, is_trivial_motion, rigidity_matrix)
from .model import (TOL_GEOM, BarFramework, BracedPolygonGraph, Framework, are_congruent,
                    convexity_margins, is_strictly_convex, is_weakly_convex,
                    lengths_equal, orientation, points_of, turn_angle_profile)


# ---------------------------------------------------------------- sampling

def sample_strictly_convex(graph, seed: int = 0, count: int = 1, jitter: float = 0.1,
                           min_margin: float = 1e-3) -> list[Framework]:
    """Seeded strictly convex frameworks: sorted random angles on a random ellipse, radial jitter.

    ``graph`` may also be a vertex count, giving plain cycles.
    """
    if isinstance(graph, int):
        graph = BracedPolygonGraph.cycle(graph)
    n = graph.n
    rng = np.random.default_rng(seed)
    min_gap = 0.25 * 2 * math.pi / n
    out = []
    while len(out) < count:
        ang = np.sort(rng.uniform(0.0, 2 * math.pi, n))
        aspect = rng.uniform(0.5, 1.0)
        rot = rng.uniform(0.0, 2 * math.pi)
        r = 1.0 + jitter * rng.uniform(-1.0, 1.0, n)
        gaps = np.diff(np.append(ang, ang[0] + 2 * math.pi))
        if gaps.min() < min_gap:
            continue
        x, y = r * np.cos(ang), aspect * r * np.sin(ang)
        c, s = math.cos(rot), math.sin(rot)
        pts = np.column_stack([c * x - s * y, s * x + c * y])
        if np.min(convexity_margins(pts)) <= min_margin or orientation(pts) <= 0:
            continue
        out.append(Framework(graph, pts))
    return out


# ---------------------------------------------------------------- push-pull and averaging

def push_pull(framework: Framework, flex, tol: float = 1e-8) -> tuple[Framework, Framework]:
    """(p + v, p - v) for an infinitesimal flex v; corresponding edge lengths agree."""
    p = points_of(framework)
    v = np.asarray(flex, dtype=float).reshape(p.shape)
    if not np.any(v):
        raise NotAFlexError("flex is zero")
    res = flex_residual(framework, v)
    if res > tol:
        raise NotAFlexError(f"edge equations violated (residual {res:.3e})")
    return framework.moved(p + v), framework.moved(p - v)


def push_pull_scaled(framework: Framework, flex, scale: float = 0.05,
                     tol_geom: float = TOL_GEOM) -> tuple[Framework, Framework]:
    """push_pull with the largest vertex displacement set to ``scale`` times the diameter.

    For a strictly convex input the scale is halved until both outputs are
    strictly convex too.
    """
    p = points_of(framework)
    v = np.asarray(flex, dtype=float).reshape(p.shape)
    top = float(np.max(np.linalg.norm(v, axis=1)))
    if top == 0.0:
        raise NotAFlexError("flex is zero")
    unit = v * (_diameter(p) / top)
    want = is_strictly_convex(p, tol_geom)
    for _ in range(30):
        pair = push_pull(framework, unit * scale)
        if not want or all(is_strictly_convex(f.points, tol_geom) for f in pair):
            return pair
        scale /= 2.0
    raise DomainError("push-pull outputs never became strictly convex")


def reverse_average(f1: Framework, f2: Framework, tol: float = 1e-8) -> tuple[Framework, np.ndarray]:
    """Midpoint framework and flex (p - q)/2 from two equal-length non-congruent realizations."""
    if f1.graph != f2.graph:
        raise GraphMismatchError("frameworks have different graphs")
    if not lengths_equal(f1, f2, tol):
        raise DomainError("corresponding edge lengths differ")
    if are_congruent(f1, f2):
        raise CongruentError("congruent inputs give a trivial flex")
    p, q = f1.points, f2.points
    return f1.moved((p + q) / 2), (p - q) / 2


def _rotate(points, alpha):
    c, s = math.cos(alpha), math.sin(alpha)
    p = points_of(points)
    return p @ np.array([[c, s], [-s, c]])


def align_rotation(f1, f2, tol: float = 1e-8) -> float:
    """Rotation angle for f2 after which every edge direction is within pi of f1's.

    With equal boundary lengths both arc-length step functions of the edge
    directions jump at the same places, so the optimal constant is the
    midrange of theta_i - phi_i measured from each polygon's first edge.
    """
    p, q = points_of(f1), points_of(f2)
    if p.shape != q.shape:
        raise GraphMismatchError("frameworks have different sizes")
    for pts in (p, q):
        if not is_strictly_convex(pts):
            raise NotConvexError("align_rotation needs strictly convex polygons")
    lp = np.linalg.norm(np.roll(p, -1, axis=0) - p, axis=1)
    lq = np.linalg.norm(np.roll(q, -1, axis=0) - q, axis=1)
    if np.max(np.abs(lp - lq)) > tol * max(lp.max(), lq.max()):
        raise DomainError("boundary edge lengths differ")
    flip = orientation(p) < 0
    if (orientation(q) < 0) != flip:
        raise DomainError("polygons have opposite orientations")
    if flip:
        p, q = p * [1, -1], q * [1, -1]
    th = turn_angle_profile(p).theta
    ph = turn_angle_profile(q).theta
    d = th - ph
    alpha = 0.5 * (d.min() + d.max())
    ep, eq = p[1] - p[0], q[1] - q[0]
    beta = alpha + math.atan2(ep[1], ep[0]) - math.atan2(eq[1], eq[0])
    beta = math.remainder(beta, 2 * math.pi)
    return -beta if flip else beta


def aligned_average(f1: Framework, f2: Framework) -> tuple[Framework, np.ndarray, float]:
    """Rotate f2 by align_rotation, then average; returns (midpoint, flex, angle)."""
    alpha = align_rotation(f1, f2)
    q = f2.moved(_rotate(f2.points, alpha))
    mid, flex = reverse_average(f1, q)
    return mid, flex, alpha


def direction_gaps(f1, f2) -> np.ndarray:
    """|theta_i - phi_i| per boundary edge, with absolute edge directions."""
    p, q = points_of(f1), points_of(f2)
    ep, eq = np.roll(p, -1, axis=0) - p, np.roll(q, -1, axis=0) - q
    cross = ep[:, 0] * eq[:, 1] - ep[:, 1] * eq[:, 0]
    dot = np.einsum("ij,ij->i", ep, eq)
    return np.abs(np.arctan2(cross, dot))


# ---------------------------------------------------------------- superposition

@dataclass(frozen=True)
class StressedPart:
    """A sub-framework given by global vertex labels, global edges and one stress per edge."""

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    stress: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class SuperpositionCertificate:
    parts: tuple[StressedPart, ...]
    total: dict = field(repr=False)
    cancelled_edges: tuple[tuple[int, int], ...]
    framework: BarFramework = field(repr=False)
    stress: np.ndarray = field(repr=False)
    super_stable: object = None


def _part_framework(points, part: StressedPart) -> BarFramework:
    idx = {v: k for k, v in enumerate(part.vertices)}
    return BarFramework(points[list(part.vertices)],
                        [(idx[a], idx[b]) for a, b in part.edges])


def superpose(points, parts, tol: float = 1e-9, check_parts: bool = True,
              tol_psd: float = TOL_PSD) -> SuperpositionCertificate:
    """Sum the parts' stresses edge by edge and certify the union.

    Parts after the first must share at least three non-collinear vertices
    with the union of the earlier ones.  Edges whose summed stress vanishes
    are dropped from the final framework.
    """
    p = points_of(points)
    parts = tuple(parts)
    if not parts:
        raise SuperpositionError("no parts")
    seen: set = set()
    for k, part in enumerate(parts):
        if len(part.stress) != len(part.edges):
            raise SuperpositionError(f"part {k}: stress length does not match its edges")
        if check_parts:
            fw = _part_framework(p, part)
            if equilibrium_residual(fw, part.stress) > 1e-8:
                raise SuperpositionError(f"part {k}: stress is not in equilibrium")
            if not is_super_stable(fw, part.stress, tol_psd=tol_psd):
                raise SuperpositionError(f"part {k} is not super stable for its stress")
        if k:
            shared = sorted(seen & set(part.vertices))
            if len(shared) < 3:
                raise SuperpositionError(f"part {k} shares only {len(shared)} vertices")
            c = p[shared] - p[shared].mean(axis=0)
            s = np.linalg.svd(c, compute_uv=False)
            if s[1] <= 1e-9 * s[0]:
                raise SuperpositionError(f"part {k} shares only collinear vertices")
        seen |= set(part.vertices)
    total: dict = {}
    for part in parts:
        for e, w in zip(part.edges, part.stress):
            e = tuple(sorted(e))
            total[e] = total.get(e, 0.0) + float(w)
    scale = max(abs(w) for w in total.values())
    cancelled = tuple(sorted(e for e, w in total.items() if abs(w) <= tol * scale))
    kept = sorted(e for e in total if e not in cancelled)
    verts = sorted(seen)
    idx = {v: k for k, v in enumerate(verts)}
    fw = BarFramework(p[verts], [(idx[a], idx[b]) for a, b in kept])
    w = np.array([total[e] for e in kept])
    if equilibrium_residual(fw, w) > 1e-8:
        raise SuperpositionError("summed stress is not in equilibrium")
    ss = is_super_stable(fw, w, tol_psd=tol_psd)
    return SuperpositionCertificate(parts, total, cancelled, fw, w, ss)


# ---------------------------------------------------------------- energy functions

@dataclass(frozen=True)
class EnergyTerm:
    """Monotone edge energy of squared length x with E(a) = 1/m and E'(a) = omega.

    kind 0 (omega > 0) increases, kind 1 (omega < 0) decreases.  Past a + delta
    (resp. below a - delta) the energy exceeds 1.
    """

    kind: int
    a: float
    delta: float
    omega: float
    kexp: float
    coef: float
    lam: float
    minv: float

    def _eval(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        k = len(x)
        rep = lambda v: np.full(k, v)  # noqa: E731
        return kernels.energy_terms(x, np.full(k, self.kind, dtype=np.intc), rep(self.a),
                                    rep(self.delta), rep(self.omega), rep(self.kexp),
                                    rep(self.coef), rep(self.lam), self.minv)

    def value(self, x):
        return self._eval(x)[0]

    def derivative(self, x):
        return self._eval(x)[1]

    def second_derivative(self, x):
        return self._eval(x)[2]


def energy_term(a: float, m: int, delta: float, omega: float) -> EnergyTerm:
    if a <= 0 or m <= 0 or delta <= 0:
        raise DomainError("a, m and delta must be positive")
    if omega == 0:
        raise DomainError("omega must be nonzero")
    minv = 1.0 / m
    if omega > 0:
        if a * omega < minv:
            return EnergyTerm(0, a, delta, omega, 1.0, 6.0 * (minv / a - omega / 2), 0.0, minv)
        return EnergyTerm(0, a, delta, omega, m * a * omega - 1.0, 0.0, 0.0, minv)
    if delta >= a:
        raise DomainError("the decreasing energy needs delta < a")
    return EnergyTerm(1, a, delta, omega, 0.0, 0.0, m * abs(omega), minv)


def energy_functions(a: float, m: int, delta: float, omega: float) -> tuple[EnergyTerm, EnergyTerm]:
    """The increasing term for |omega| and the decreasing term for -|omega|."""
    w = abs(omega)
    return energy_term(a, m, delta, w), energy_term(a, m, delta, -w)


class _Energy:
    """Composite energy sum_e E_e(|p_i - p_j|^2) over a fixed edge list."""

    def __init__(self, edges, terms):
        e = np.asarray(edges, dtype=np.intp).reshape(-1, 2)
        self.eu, self.ev = e[:, 0].copy(), e[:, 1].copy()
        self.kind = np.array([t.kind for t in terms], dtype=np.intc)
        self.a = np.array([t.a for t in terms])
        self.delta = np.array([t.delta for t in terms])
        self.omega = np.array([t.omega for t in terms])
        self.kexp = np.array([t.kexp for t in terms])
        self.coef = np.array([t.coef for t in terms])
        self.lam = np.array([t.lam for t in terms])
        self.minv = terms[0].minv

    def __call__(self, x, order=0):
        return kernels.energy_eval(x, self.eu, self.ev, self.kind, self.a, self.delta, self.omega,
                                   self.kexp, self.coef, self.lam, self.minv, order)

    def force_scale(self, x) -> float:
        """Largest single-edge force |2 E'(l^2) l|; the gradient's roundoff floor scales with it."""
        p = np.asarray(x).reshape(-1, 2)
        d = p[self.eu] - p[self.ev]
        return float(np.max(2.0 * np.abs(self.stress(x)) * np.linalg.norm(d, axis=1)))

    def stress(self, x):
        p = np.asarray(x).reshape(-1, 2)
        d = p[self.eu] - p[self.ev]
        sq = np.einsum("ij,ij->i", d, d)
        return kernels.energy_terms(sq, self.kind, self.a, self.delta, self.omega,
                                    self.kexp, self.coef, self.lam, self.minv)[1]


def minimize_energy(energy, x0, gtol: float, max_iter: int = 500):
    """Damped Newton with eigenvalue flooring and Armijo backtracking.

    Stops when |grad| < gtol * max(1, largest edge force) when the energy
    exposes ``force_scale``, else when |grad| < gtol.
    """
    x = np.array(x0, dtype=float)
    val, g, h = energy(x, 2)
    scale = getattr(energy, "force_scale", lambda _x: 1.0)
    stalls = 0
    for it in range(max_iter):
        if np.linalg.norm(g) < gtol * max(1.0, scale(x)):
            return x, it
        lam, vec = np.linalg.eigh(h)
        floor = 1e-10 * max(np.abs(lam).max(), 1.0)
        lam = np.maximum(np.abs(lam), floor)
        step = -vec @ ((vec.T @ g) / lam)
        slope = float(g @ step)
        if -slope < 1e-13 * max(1.0, abs(val)):
            # predicted decrease is below the energy's resolution; judge by the gradient instead
            xn = x + step
            vn, gn, hn = energy(xn, 2)
            if np.linalg.norm(gn) < np.linalg.norm(g):
                x, val, g, h = xn, vn, gn, hn
                continue
        t = 1.0
        while True:
            xn = x + t * step
            vn = energy(xn, 0)[0]
            if vn <= val + 1e-4 * t * slope or t < 1e-12:
                break
            t *= 0.5
        if t < 1e-12:
            stalls += 1
            if stalls >= 5:
                exc = ConvergenceError(f"stalled at |grad| = {np.linalg.norm(g):.3e}")
                exc.last = x
                raise exc
            # fall back to steepest descent
            step = -g
            t = 1.0
            while t > 1e-16:
                xn = x + t * step
                vn = energy(xn, 0)[0]
                if vn < val:
                    break
                t *= 0.5
            else:
                exc = ConvergenceError("line search failed")
                exc.last = x
                raise exc
        x = xn
        val, g, h = energy(x, 2)
    if np.linalg.norm(g) < gtol * max(1.0, scale(x)):
        return x, max_iter
    exc = ConvergenceError(f"no critical point after {max_iter} iterations (|grad| = {np.linalg.norm(g):.3e})")
    exc.last = x
    raise exc


# ---------------------------------------------------------------- realization

@dataclass(frozen=True)
class Realization:
    framework: Framework
    stress: np.ndarray = field(repr=False)
    sequence: ConstructionSequence = field(repr=False)
    positive_braces: tuple = ()
    retries: int = 0


_SCALE_FLOOR = 2.0


def _normalize_state(points, omega, edges):
    """Center and scale to unit diameter; scale omega so min a_e |w_e| = 1/m.

    With a_e |w_e| >= 1/m every increasing term has a nondecreasing derivative,
    so all terms are convex in the squared length.
    """
    p = points - points.mean(axis=0)
    diam = float(np.max(np.linalg.norm(p[:, None, :] - p[None, :, :], axis=2)))
    p = p / diam
    d = p[edges[:, 0]] - p[edges[:, 1]]
    a = np.einsum("ij,ij->i", d, d)
    nz = np.abs(omega) > 0
    w = _SCALE_FLOOR * omega / (np.min(a[nz] * np.abs(omega[nz])) * len(edges))
    return p, w, a


_EQ_TOL = 1e-9
_EPS_LADDER = (1.0, 10.0, 0.1)


def _residual(en, edges, x):
    return equilibrium_residual(BarFramework(x.reshape(-1, 2), edges), en.stress(x))


def _relax(points, edges, omega, targets, eps, delta_rel, max_retries, tol_geom):
    """Minimize the composite energy after adding braces with zero stress.

    ``targets`` maps edge index -> sign of the new brace target (+1 or -1);
    returns (points, stress, retries).
    """
    p, w0, a = _normalize_state(points, omega, edges)
    mean_boundary = float(np.mean(w0[w0 > 0])) if np.any(w0 > 0) else float(np.max(np.abs(w0)))
    m = len(edges)
    last = None
    attempt = 0
    # any starting brace stress works once delta is small; vary it if a relaxation stalls
    for scale in _EPS_LADDER:
        w = w0.copy()
        for k, s in targets.items():
            # never below the convexity floor used for the other terms
            w[k] = s * max(eps * scale * mean_boundary, _SCALE_FLOOR / (a[k] * m))
        delta = delta_rel
        for _ in range(max_retries + 1):
            try:
                terms = [energy_term(a[k], m, delta * a[k], w[k]) for k in range(m)]
                en = _Energy(edges, terms)
                try:
                    x, _ = minimize_energy(en, p.reshape(-1), gtol=1e-10 * len(p))
                except ConvergenceError as exc:
                    # stalled near the roundoff floor; keep it if it is in equilibrium
                    x = getattr(exc, "last", None)
                    if x is None or _residual(en, edges, x) > _EQ_TOL:
                        raise
                q = x.reshape(-1, 2)
                stress = en.stress(x)
                if _residual(en, edges, x) > _EQ_TOL:
                    raise ConvergenceError("critical point not reached to equilibrium tolerance")
                signs_ok = np.all(np.sign(stress) == np.sign(w))
                if signs_ok and is_strictly_convex(q, tol_geom):
                    return q, stress, attempt
                last = "signs or strict convexity lost"
            except ConvergenceError as exc:
                last = str(exc)
            delta /= 4.0
            attempt += 1
    raise ConvergenceError(f"energy relaxation failed after {attempt} attempts: {last}")


def _base_state(base):
    sq = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    verts = list(base)
    braces = {(base[0], base[2]), (base[1], base[3])}
    return verts, braces, sq


def _edge_list(verts, braces):
    k = len(verts)
    pos = {v: i for i, v in enumerate(verts)}
    bnd = [(verts[i], verts[(i + 1) % k]) for i in range(k)]
    br = sorted(braces)
    edges = [tuple(sorted((pos[a], pos[b]))) for a, b in bnd] + \
            [tuple(sorted((pos[a], pos[b]))) for a, b in br]
    labels = [tuple(sorted(e)) for e in bnd] + list(br)
    return np.array(edges, dtype=np.intp), labels


@lru_cache(maxsize=4096)
def _realize_steps(n, base, steps, eps, delta_rel, max_retries, tol_geom):
    """Replay op1/op2 steps from K4 on the unit square, relaxing after each."""
    verts, braces, pts = _base_state(base)
    edges, labels = _edge_list(verts, braces)
    omega = np.array([1.0, 1.0, 1.0, 1.0, -1.0, -1.0])
    retries = 0
    for st in steps:
        old = dict(zip(labels, omega))
        pos = {v: i for i, v in enumerate(verts)}
        new_pts = {v: pts[pos[v]] for v in verts}
        split_force = {}
        for (a, c), v in zip(st.split_edges, st.new_vertices):
            k = len(verts)
            i = [t for t in range(k) if {verts[t], verts[(t + 1) % k]} == {a, c}][0]
            verts.insert(i + 1, v)
            new_pts[v] = 0.5 * (new_pts[a] + new_pts[c])
            split_force[tuple(sorted((a, c)))] = v
        b = tuple(sorted(st.brace))
        braces.add(b)
        edges, labels = _edge_list(verts, braces)
        pts = np.array([new_pts[v] for v in verts])
        omega = np.zeros(len(labels))
        for k, lab in enumerate(labels):
            if lab in old:
                omega[k] = old[lab]
        for (a, c), v in split_force.items():
            # each half carries the old force, so the stress doubles
            for half in (tuple(sorted((a, v))), tuple(sorted((v, c)))):
                omega[labels.index(half)] = 2.0 * old[(a, c)]
        pts, omega, r = _relax(pts, edges, omega, {labels.index(b): -1}, eps, delta_rel,
                               max_retries, tol_geom)
        retries += r
    return tuple(verts), tuple(labels), pts, omega, retries


def realize_properly_stressed(graph: BracedPolygonGraph, positive=(), epsilon: float = 1e-3,
                              delta: float = 0.05, max_retries: int = 8,
                              tol_geom: float = TOL_GEOM, tol_psd: float = TOL_PSD,
                              certify: bool = True) -> Realization:
    """Strictly convex framework with an equilibrium stress that is proper on G - B and positive on B.

    ``positive`` is the brace set B (0-based pairs); G - B must be 3-connected.
    Certification re-checks properness and super stability and raises on failure.
    """
    pos_set = {tuple(sorted(b)) for b in positive}
    if not pos_set <= set(graph.braces):
        raise DomainError("positive braces must be braces of the graph")
    if graph.n < 4 or not is_3_connected(graph):
        raise NotConnectedError("graph is not 3-connected")
    rest = graph.without_braces(pos_set)
    if not is_3_connected(rest):
        raise NotConnectedError("graph minus the positive braces is not 3-connected")
    core = spanning_minimal_subgraph(rest)
    seq = construction_sequence(core)
    verts, labels, pts, omega, retries = _realize_steps(
        graph.n, seq.base, seq.steps, epsilon, delta, max_retries, tol_geom)
    # reorder to the target labels
    order = np.argsort(verts)
    pts = pts[order]
    stress = np.zeros(graph.m)
    idx = graph.edge_index
    for lab, w in zip(labels, omega):
        stress[idx[lab]] = w
    extra = [b for b in graph.braces if b not in core.brace_set]
    if extra:
        targets = {idx[b]: (1 if b in pos_set else -1) for b in extra}
        pts, stress, r = _relax(pts, graph.edge_array, stress, targets, epsilon, delta,
                                max_retries, tol_geom)
        retries += r
    fw = Framework(graph, pts)
    stress = stress / np.max(np.abs(stress))
    if certify:
        _certify(fw, stress, pos_set, tol_geom, tol_psd)
    full_seq = construction_sequence(graph) if extra else seq
    return Realization(fw, stress, full_seq, tuple(sorted(pos_set)), retries)


def _certify(fw, stress, pos_set, tol_geom, tol_psd):
    g = fw.graph
    if not is_strictly_convex(fw.points, tol_geom):
        raise ConvergenceError("realization is not strictly convex")
    if equilibrium_residual(fw, stress) > 1e-8:
        raise NotEquilibriumError("realized stress is not in equilibrium")
    idx = g.edge_index
    pos_idx = [idx[b] for b in pos_set]
    if pos_set:
        mask = np.ones(g.m, dtype=bool)
        mask[pos_idx] = False
        if not (np.all(stress[:g.n] > 0) and np.all(stress[g.n:][mask[g.n:]] < 0)
                and np.all(stress[pos_idx] > 0)):
            raise ConvergenceError("realized stress has wrong signs")
    elif not is_proper_stress(g, stress):
        raise ConvergenceError("realized stress is not proper")
    ss = is_super_stable(fw, stress, tol_psd=tol_psd)
    if not ss and not pos_set:
        raise ConvergenceError(f"realization is not super stable: {ss.reason}")


# ---------------------------------------------------------------- witnesses

@dataclass(frozen=True)
class FlexWitness:
    base: Framework
    flex: np.ndarray = field(repr=False)
    plus: Framework = field(repr=False)
    minus: Framework = field(repr=False)
    strictly_convex_side: str | None
    method: str = ""

    @property
    def both_strictly_convex(self) -> bool:
        return self.strictly_convex_side == "both"

    def convex_side(self) -> Framework:
        return self.minus if self.strictly_convex_side == "minus" else self.plus


def _convex_side(plus, minus, tol_geom):
    a = is_strictly_convex(plus.points, tol_geom)
    b = is_strictly_convex(minus.points, tol_geom)
    return "both" if a and b else "plus" if a else "minus" if b else None


def _make_witness(base, flex, method, tol_geom):
    plus, minus = push_pull(base, flex)
    if are_congruent(plus, minus) or not lengths_equal(plus, minus, 1e-10):
        return None
    side = _convex_side(plus, minus, tol_geom)
    if side is None:
        return None
    return FlexWitness(base, np.asarray(flex), plus, minus, side, method)


def _diameter(p):
    return float(np.max(np.linalg.norm(p[:, None, :] - p[None, :, :], axis=2)))


def _scaled_witness(base, v, method, tol_geom):
    """Scale the flex to 5% of the diameter, then search larger scales keeping one side strictly convex."""
    p = base.points
    unit = 0.05 * _diameter(p) / np.max(np.linalg.norm(v, axis=1))
    best = None
    for s in (1.0, 0.5, 0.25, 0.1, 0.03):
        best = _make_witness(base, v * unit * s, method, tol_geom)
        if best is not None:
            break
    if best is None:
        return None
    if best.strictly_convex_side != "both":
        lo, hi = unit, None
        scale = unit
        for _ in range(12):
            trial = scale * 2 if hi is None else 0.5 * (lo + hi)
            w = _make_witness(base, v * trial, method, tol_geom)
            if w is not None and w.strictly_convex_side is not None:
                lo, best = trial, w
                if w.strictly_convex_side == "both":
                    break
            else:
                hi = trial
            scale = trial
            if hi is not None and hi - lo < 1e-3 * unit:
                break
    return best


def reflection_witness(framework: Framework, tol_geom: float = TOL_GEOM) -> FlexWitness | None:
    """Reflect one side of a 2-vertex cut across the cut line; average back to a flex."""
    g = framework.graph
    p = framework.points
    for u, v in two_vertex_cuts(g):
        side = _cut_side(g, u, v)
        d = p[v] - p[u]
        d = d / np.linalg.norm(d)
        q = p.copy()
        rel = q[side] - p[u]
        q[side] = p[u] + 2 * np.outer(rel @ d, d) - rel
        other = framework.moved(q)
        if are_congruent(framework, other):
            continue
        base, flex = reverse_average(framework, other)
        w = FlexWitness(base, flex, framework, other,
                        _convex_side(framework, other, tol_geom), "reflection")
        if w.strictly_convex_side is not None:
            return w
    return None


def _cut_side(g, u, v):
    """Vertices of one component of G - {u, v}."""
    removed = (1 << u) | (1 << v)
    start = next(x for x in range(g.n) if x not in (u, v))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        nb = g.adjacency[x] & ~removed
        while nb:
            low = nb & -nb
            y = low.bit_length() - 1
            nb ^= low
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return sorted(seen)


def _flatten(p, subset, ts):
    """Move the vertices of ``subset`` (cyclic runs) onto chords between their outer neighbours."""
    n = len(p)
    q = p.copy()
    runs = []
    s = sorted(subset)
    for v in s:
        if runs and (runs[-1][-1] + 1) % n == v:
            runs[-1].append(v)
        else:
            runs.append([v])
    if len(runs) > 1 and (runs[-1][-1] + 1) % n == runs[0][0]:
        runs[0] = runs.pop() + runs[0]
    k = 0
    for run in runs:
        a, b = p[(run[0] - 1) % n], p[(run[-1] + 1) % n]
        params = sorted(ts[k:k + len(run)])
        k += len(run)
        for v, t in zip(run, params):
            q[v] = (1 - t) * a + t * b
    return q


def find_nonglobal_witness(graph: BracedPolygonGraph, budget: int = 4000, seed: int = 0,
                           subset_cap: int = 2, positions: int = 64,
                           tol_geom: float = TOL_GEOM, tol_rank: float = TOL_RANK) -> FlexWitness | None:
    """Search flattened convex configurations for a flex whose push-pull has a strictly convex side.

    Returns the first witness in search order, or None when the budget (number
    of flex computations) runs out; None is inconclusive.
    """
    base = sample_strictly_convex(graph, seed=seed, count=1, jitter=0.0)[0]
    if graph.n > 3 and two_vertex_cuts(graph):
        w = reflection_witness(base, tol_geom)
        if w is not None:
            return w
    p = base.points
    n = graph.n
    grid = (np.arange(positions) + 0.5) / positions
    rng = np.random.default_rng(seed)
    used = 0
    for size in range(1, subset_cap + 1):
        for subset in combinations(range(n), size):
            if size == 2 and (subset[1] - subset[0]) % n not in (1, n - 1):
                # independent flat vertices: sample parameter pairs
                cand = [(grid[i], grid[j]) for i, j in
                        rng.integers(0, positions, size=(positions, 2))]
            elif size == 2:
                cand = [tuple(sorted(rng.uniform(0.05, 0.95, 2))) for _ in range(positions)]
            else:
                cand = [(t,) for t in grid]
            for ts in cand:
                if used >= budget:
                    return None
                used += 1
                q = _flatten(p, subset, ts)
                if not is_weakly_convex(q, tol_geom):
                    continue
                fw = Framework(graph, q)
                try:
                    flexes = infinitesimal_flexes(fw, tol_rank)
                except DomainError:
                    continue
                for v in flexes:
                    if is_trivial_motion(q, v):
                        continue
                    w = _scaled_witness(fw, v, f"flatten {[x + 1 for x in subset]}", tol_geom)
                    if w is not None:
                        return w
    return None


def witness_is_valid(w: FlexWitness, tol_geom: float = TOL_GEOM) -> bool:
    if not lengths_equal(w.plus, w.minus, 1e-10) or are_congruent(w.plus, w.minus):
        return False
    if flex_residual(w.base, w.flex) > 1e-8:
        return False
    side = _convex_side(w.plus, w.minus, tol_geom)
    return w.strictly_convex_side is not None and side is not None and (
        w.strictly_convex_side == side or side == "both")


# ---------------------------------------------------------------- flexible strictly convex search

def search_flexible_convex(graph: BracedPolygonGraph, seed: int = 0, starts: int = 8,
                           tol: float = 1e-10, tol_geom: float = TOL_GEOM):
    """Minimize the smallest relevant singular value of R over strictly convex configurations.

    Returns a strictly convex Framework with a nontrivial flex, or None.
    """
    from scipy.optimize import minimize

    n = graph.n
    k = 2 * n - 3
    out = None

    def ratio(x):
        R = rigidity_matrix(BarFramework(x.reshape(-1, 2), graph.edge_array))
        s = np.linalg.svd(R, compute_uv=False)
        return s[k - 1] / s[0]

    def objective(x):
        q = x.reshape(-1, 2)
        marg = convexity_margins(q)
        pen = np.sum(np.maximum(0.0, 1e-3 - marg) ** 2) * 1e4
        return ratio(x) + pen

    for fw in sample_strictly_convex(graph, seed=seed, count=starts):
        res = minimize(objective, fw.points.reshape(-1), method="Nelder-Mead",
                       options={"maxiter": 4000, "xatol": 1e-12, "fatol": 1e-14})
        q = res.x.reshape(-1, 2)
        if is_strictly_convex(q, tol_geom) and ratio(res.x) < tol:
            out = Framework(graph, q)
            break
    return out
