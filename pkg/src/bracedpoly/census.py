"""Enumeration and classification of small braced polygonal circuits.

Graphs are enumerated up to the dihedral symmetry of the boundary cycle.
Each circuit gets one of five labels together with the evidence that
decided it; census files are JSON lines, one record per canonical graph.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .combin import (
    canonical_braces,
    is_3_connected,
    is_generic_rigidity_circuit,
    is_minimally_3_connected,
    spanning_minimal_subgraph,
    unique_interval_property,
)
from .construct import (
    StressedPart,
    find_nonglobal_witness,
    realize_properly_stressed,
    sample_strictly_convex,
    search_flexible_convex,
    superpose,
)
from .errors import DomainError, GraphError, SuperpositionError
from .linalg import (
    TOL_PSD,
    TOL_RANK,
    equilibrium_residual,
    equilibrium_stresses,
    is_super_stable,
    rigidity_report,
    spectral_signature,
    stress_matrix,
)
from .model import (
    BarFramework,
    BracedPolygonGraph,
    Framework,
    all_chords,
    is_strictly_convex,
    is_weakly_convex,
)

PROPER_ALWAYS = "PROPER_ALWAYS"
SUPER_STABLE_ALWAYS = "SUPER_STABLE_ALWAYS"
CONVEXLY_RIGID_NOT_GLOBAL = "CONVEXLY_RIGID_NOT_GLOBAL"
NOT_CONVEXLY_RIGID = "NOT_CONVEXLY_RIGID"
UNKNOWN = "UNKNOWN"
CLASSES = (PROPER_ALWAYS, SUPER_STABLE_ALWAYS, CONVEXLY_RIGID_NOT_GLOBAL, NOT_CONVEXLY_RIGID, UNKNOWN)

MIN_N, MAX_N = 4, 10
BITMASK_MAX_N = 8


def _check_n(n, hi=MAX_N):
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or not MIN_N <= n <= hi:
        raise GraphError(f"n must be an integer in {MIN_N}..{hi}, got {n!r}")
    return int(n)


# ---------------------------------------------------------------- enumeration

@lru_cache(maxsize=None)
def _circuits(n):
    seen = set()
    out = []
    for bs in combinations(all_chords(n), n - 2):
        key = canonical_braces(n, bs)
        if key in seen:
            continue
        seen.add(key)
        g = BracedPolygonGraph(n, key)
        if is_generic_rigidity_circuit(g):
            out.append(g)
    out.sort(key=lambda g: g.braces)
    return tuple(out)


def enumerate_circuits(n: int) -> list[BracedPolygonGraph]:
    """All braced polygonal circuits on n vertices, one canonical graph per dihedral class."""
    return list(_circuits(_check_n(n)))


def _dihedral_chord_maps(n):
    chords = all_chords(n)
    idx = {c: k for k, c in enumerate(chords)}
    maps = []
    for s in range(n):
        for refl in (False, True):
            if refl:
                f = lambda v, s=s: (s - v) % n
            else:
                f = lambda v, s=s: (v + s) % n
            maps.append([idx[tuple(sorted((f(a), f(b))))] for a, b in chords])
    return chords, maps


def brace_class_codes(n: int, brace_count: int | None = None) -> np.ndarray:
    """Least chord bitmask of every dihedral class of brace sets.

    Bit k stands for ``all_chords(n)[k]``.  Works on all 2^(#chords) masks at
    once, so it is limited to n <= 8.
    """
    n = _check_n(n, BITMASK_MAX_N)
    chords, maps = _dihedral_chord_maps(n)
    m = len(chords)
    codes = np.arange(1 << m, dtype=np.int64)
    if brace_count is not None:
        codes = codes[np.bitwise_count(codes) == brace_count]
    best = codes.copy()
    for perm in maps:
        img = np.zeros_like(codes)
        for i, j in enumerate(perm):
            img |= ((codes >> i) & 1) << j
        np.minimum(best, img, out=best)
    return np.unique(best)


def _graph_of_code(n, chords, code):
    code = int(code)
    return BracedPolygonGraph(n, tuple(c for k, c in enumerate(chords) if code >> k & 1))


def enumerate_circuits_bitmask(n: int) -> list[BracedPolygonGraph]:
    """Second generator: bitmask classes tested by direct subgraph counting."""
    codes = brace_class_codes(n, n - 2)
    chords = all_chords(n)
    out = []
    for c in codes:
        g = _graph_of_code(n, chords, c)
        if is_generic_rigidity_circuit(g, method="subsets"):
            out.append(BracedPolygonGraph(n, canonical_braces(n, g.braces)))
    out.sort(key=lambda g: g.braces)
    return out


def enumerate_graphs(n: int, three_connected: bool = True) -> list[BracedPolygonGraph]:
    """Every braced polygon graph on n <= 8 vertices up to symmetry, any number of braces."""
    codes = brace_class_codes(n)
    chords = all_chords(n)
    out = []
    for c in codes:
        g = _graph_of_code(n, chords, c)
        if three_connected and not is_3_connected(g):
            continue
        out.append(BracedPolygonGraph(n, canonical_braces(n, g.braces)))
    out.sort(key=lambda g: (len(g.braces), g.braces))
    return out


# ---------------------------------------------------------------- superposition search

@dataclass(frozen=True)
class PlanPart:
    """Minimally 3-connected circuit on a vertex subset, edges in global labels.

    Edges run over the sub-polygon boundary first, then its braces; ``signs``
    are those of the part's stress at every strictly convex placement.
    """

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    signs: tuple[int, ...]


@dataclass(frozen=True)
class SuperpositionPlan:
    """Parts glued in order; ``cancels[k]`` is the non-edge zeroed when part k is added."""

    graph: BracedPolygonGraph
    parts: tuple[PlanPart, ...]
    cancels: tuple[tuple[int, int] | None, ...]

    def certify(self, points, tol_psd: float = TOL_PSD):
        """Superpose the parts' stresses at ``points``; raises SuperpositionError if the plan fails there."""
        p = np.asarray(points, dtype=float)
        edges_g = set(self.graph.edges)
        acc: dict = {}
        stressed = []
        for part, cancel in zip(self.parts, self.cancels):
            idx = {v: k for k, v in enumerate(part.vertices)}
            fw = BarFramework(p[list(part.vertices)], [(idx[a], idx[b]) for a, b in part.edges])
            basis = equilibrium_stresses(fw)
            if basis.shape[0] != 1:
                raise SuperpositionError(f"part on {_lab(part.vertices)} has a {basis.shape[0]}-dim stress space")
            w = basis[0] * (1.0 if basis[0][0] > 0 else -1.0)
            if np.any(np.sign(w) != np.array(part.signs)):
                raise SuperpositionError(f"part on {_lab(part.vertices)} is not properly stressed")
            coef = 1.0
            if cancel is not None:
                k = part.edges.index(cancel)
                coef = -acc[cancel] / w[k]
            w = coef * w
            for e, x in zip(part.edges, w):
                acc[e] = acc.get(e, 0.0) + x
            stressed.append(StressedPart(part.vertices, part.edges, w))
        cert = superpose(p, stressed, tol_psd=tol_psd)
        if cert.framework.n != self.graph.n:
            raise SuperpositionError("parts do not cover every vertex")
        stray = [e for e, x in cert.total.items() if e not in edges_g and e not in cert.cancelled_edges]
        if stray:
            raise SuperpositionError(f"non-edges keep stress: {_lab_edges(stray)}")
        if not cert.super_stable:
            raise SuperpositionError(f"superposed framework is not super stable: {cert.super_stable.reason}")
        return cert

    def as_dict(self) -> dict:
        return {"parts": [{"vertices": [v + 1 for v in part.vertices],
                           "braces": _lab_edges(part.edges[len(part.vertices):]),
                           "cancels": None if c is None else [c[0] + 1, c[1] + 1]}
                          for part, c in zip(self.parts, self.cancels)]}


def _lab(vs):
    return [v + 1 for v in vs]


def _lab_edges(es):
    return [[a + 1, b + 1] for a, b in es]


@lru_cache(maxsize=None)
def _labelled_m3c(k):
    out = set()
    for g in _circuits(k):
        if not is_minimally_3_connected(g):
            continue
        for s in range(k):
            for refl in (False, True):
                out.add(g.relabel(s, refl).braces)
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def _part_catalog(n):
    parts = []
    for k in range(4, n + 1):
        local = _labelled_m3c(k)
        for sub in combinations(range(n), k):
            bnd = tuple(tuple(sorted((sub[i], sub[(i + 1) % k]))) for i in range(k))
            for braces in local:
                br = tuple(tuple(sorted((sub[a], sub[b]))) for a, b in braces)
                parts.append(PlanPart(sub, bnd + br, (1,) * k + (-1,) * len(br)))
    return tuple(parts)


_MIXED = 2


def _glue(states, part, edges_g):
    """Add a part with the one coefficient that cancels a pending non-edge, if any."""
    opposite = [e for e, s in zip(part.edges, part.signs)
                if e not in edges_g and states.get(e, 0) == -s]
    if len(opposite) > 1:
        return None
    cancel = opposite[0] if opposite else None
    new = dict(states)
    for e, s in zip(part.edges, part.signs):
        cur = new.get(e, 0)
        if e == cancel:
            new[e] = 0
        elif cur == 0:
            new[e] = s
        elif cur != s:
            if e not in edges_g:
                return None  # sign of a non-edge would depend on the placement
            new[e] = _MIXED
    return new, cancel


def find_superposition(graph: BracedPolygonGraph, max_parts: int = 4) -> SuperpositionPlan | None:
    """Search for a superposition of minimally 3-connected circuits on vertex subsets.

    Each added part shares at least three vertices with the earlier ones and
    may cancel one non-edge of definite opposite sign.  A plan that covers all
    vertices and leaves no stressed non-edge proves super stability at every
    strictly convex placement.  Returns the shortest plan found, or None.
    """
    n = graph.n
    if n < 4 or n > 8:
        return None
    edges_g = frozenset(graph.edges)
    full = (1 << n) - 1
    cands = []
    for p in _part_catalog(n):
        extra = sum(e not in edges_g for e in p.edges)
        if extra <= max_parts - 1:
            cands.append((p, sum(1 << v for v in p.vertices), extra))
    cands.sort(key=lambda c: (c[2], -len(c[0].vertices)))
    failed = set()

    def pending(states):
        return sum(1 for e, s in states.items() if e not in edges_g and s in (1, -1))

    def dfs(chain, cancels, mask, states, left):
        if mask == full and pending(states) == 0:
            return True
        if left == 0:
            return False
        key = (mask, frozenset(states.items()), left)
        if key in failed:
            return False
        for p, pm, _ in cands:
            if chain:
                if bin(mask & pm).count("1") < 3:
                    continue
            res = _glue(states, p, edges_g)
            if res is None:
                continue
            new, cancel = res
            if chain and cancel is None and pm & ~mask == 0:
                continue
            if pending(new) > left - 1:
                continue
            chain.append(p)
            cancels.append(cancel)
            if dfs(chain, cancels, mask | pm, new, left - 1):
                return True
            chain.pop()
            cancels.pop()
        failed.add(key)
        return False

    for depth in range(1, max_parts + 1):
        chain, cancels = [], []
        if dfs(chain, cancels, 0, {}, depth):
            return SuperpositionPlan(graph, tuple(chain), tuple(cancels))
    return None


# ---------------------------------------------------------------- red edges

def red_edge_analysis(graph: BracedPolygonGraph) -> frozenset:
    """Braces whose stress is not negative at every strictly convex placement.

    A brace keeps a negative stress everywhere exactly when removing it
    breaks 3-connectivity.
    """
    if not is_3_connected(graph) or not is_generic_rigidity_circuit(graph):
        raise GraphError("red edges are defined for 3-connected braced polygonal circuits")
    return frozenset(b for b in graph.braces if is_3_connected(graph.without_braces([b])))


def red_edge_cross_check(graph: BracedPolygonGraph, seed: int = 0, samples: int = 50,
                         epsilon: float = 1e-3, delta: float = 0.05) -> dict:
    """Sampling check of the red set.

    Every red brace gets a constructed strictly convex placement where its
    stress is positive; every other brace is checked negative at random samples.
    """
    red = red_edge_analysis(graph)
    idx = graph.edge_index
    positive_found = {}
    for b in sorted(red):
        r = realize_properly_stressed(graph, positive=[b], epsilon=epsilon, delta=delta)
        positive_found[b] = bool(r.stress[idx[b]] > 0 and is_strictly_convex(r.framework.points))
    violations = 0
    for fw in sample_strictly_convex(graph, seed=seed, count=samples):
        basis = equilibrium_stresses(fw)
        if basis.shape[0] != 1:
            violations += 1
            continue
        w = basis[0] * np.sign(basis[0][0])
        for b in graph.braces:
            if b not in red and w[idx[b]] >= 0:
                violations += 1
    return {"red": sorted(red), "positive_found": positive_found,
            "non_red_violations": violations, "samples": samples}


# ---------------------------------------------------------------- converse construction

@dataclass(frozen=True)
class ZeroBraceRealization:
    framework: Framework
    stress: np.ndarray = field(repr=False)
    subgraph: BracedPolygonGraph
    ratio: float  # smallest |brace stress| over the largest |stress|


def zero_brace_realization(graph: BracedPolygonGraph, epsilon: float = 1e-3,
                           delta: float = 0.05) -> ZeroBraceRealization:
    """Strictly convex placement of a non-minimal circuit where some brace carries no stress.

    Realizes a spanning minimally 3-connected subgraph with a proper stress and
    recomputes the stress space of the whole graph at that placement.
    """
    if not is_generic_rigidity_circuit(graph) or not is_3_connected(graph):
        raise GraphError("need a 3-connected braced polygonal circuit")
    if is_minimally_3_connected(graph):
        raise GraphError("graph is minimally 3-connected; every brace stress is negative")
    sub = spanning_minimal_subgraph(graph)
    r = realize_properly_stressed(sub, epsilon=epsilon, delta=delta)
    fw = Framework(graph, r.framework.points)
    basis = equilibrium_stresses(fw)
    if basis.shape[0] == 1:
        w = basis[0]
    else:
        # placement is not infinitesimally rigid; the subgraph's stress is one of several
        w = np.zeros(graph.m)
        for e, x in zip(sub.edges, r.stress):
            w[graph.edge_index[e]] = x
        if equilibrium_residual(fw, w) > 1e-8:
            raise DomainError("extended stress is not in equilibrium")
    w = w / np.max(np.abs(w))
    ratio = float(np.min(np.abs(w[graph.n:])))
    return ZeroBraceRealization(fw, w, sub, ratio)


# ---------------------------------------------------------------- classification

@dataclass(frozen=True)
class ClassificationRecord:
    graph: BracedPolygonGraph
    is_circuit: bool
    is_3connected: bool
    is_min_3connected: bool
    has_uip: bool
    label: str
    confidence: str
    evidence: dict = field(default_factory=dict)
    red_edges: tuple = ()

    def __post_init__(self):
        if self.label not in CLASSES:
            raise ValueError(f"unknown class {self.label!r}")
        if self.label == PROPER_ALWAYS and not (self.is_min_3connected and self.is_circuit):
            raise ValueError("PROPER_ALWAYS needs a minimally 3-connected circuit")

    def as_dict(self) -> dict:
        return {
            "n": self.graph.n,
            "braces": self.graph.labels(),
            "is_circuit": self.is_circuit,
            "is_3connected": self.is_3connected,
            "is_min_3connected": self.is_min_3connected,
            "has_uip": self.has_uip,
            "class": self.label,
            "confidence": self.confidence,
            "red_edges": _lab_edges(self.red_edges),
            "evidence": self.evidence,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))


def _round(x, digits=10):
    return [[round(float(a), digits) for a in row] for row in np.asarray(x)]


def _rigid_samples(graph, seed, count, tol_rank):
    flexible = 0
    for fw in sample_strictly_convex(graph, seed=seed, count=count):
        if not rigidity_report(fw, tol_rank).is_inf_rigid:
            flexible += 1
    return flexible


def _super_stable_samples(graph, seed, count, tol_psd):
    good = 0
    for fw in sample_strictly_convex(graph, seed=seed, count=count):
        basis = equilibrium_stresses(fw)
        if basis.shape[0] == 1 and is_super_stable(fw, basis[0], tol_psd=tol_psd):
            good += 1
    return good


def classify(graph: BracedPolygonGraph, seed: int = 0, sample_count: int = 50,
             budget: int = 4000, tol_rank: float = TOL_RANK, tol_psd: float = TOL_PSD,
             flex_search: bool = True) -> ClassificationRecord:
    """Label a braced polygon graph with the strongest property that can be certified."""
    g = graph
    circuit = is_generic_rigidity_circuit(g)
    three = g.n >= 4 and is_3_connected(g)
    minimal = three and is_minimally_3_connected(g)
    uip = bool(unique_interval_property(g)) if circuit else False
    red = tuple(sorted(red_edge_analysis(g))) if circuit and three else ()
    flags = dict(graph=g, is_circuit=circuit, is_3connected=three, is_min_3connected=minimal,
                 has_uip=uip, red_edges=red)

    if circuit and minimal:
        return ClassificationRecord(label=PROPER_ALWAYS, confidence="theorem",
                                    evidence={"rule": "minimally 3-connected circuit"}, **flags)

    evidence = {}
    plan = find_superposition(g) if three else None
    if plan is not None:
        failures = 0
        for fw in sample_strictly_convex(g, seed=seed, count=sample_count):
            try:
                plan.certify(fw.points, tol_psd)
            except SuperpositionError:
                failures += 1
        evidence["superposition"] = plan.as_dict()
        evidence["samples"] = sample_count
        evidence["psd_violations"] = failures
        if failures == 0:
            return ClassificationRecord(label=SUPER_STABLE_ALWAYS, confidence="proved",
                                        evidence=evidence, **flags)

    witness = find_nonglobal_witness(g, budget=budget, seed=seed, tol_rank=tol_rank)
    flexible = None
    if witness is not None:
        evidence["witness"] = {"method": witness.method, "strictly_convex_side": witness.strictly_convex_side,
                               "plus": _round(witness.plus.points), "minus": _round(witness.minus.points)}
        base = witness.base
        if is_strictly_convex(base.points) and not rigidity_report(base, tol_rank).is_inf_rigid:
            flexible = base
    if flexible is None and flex_search:
        flexible = search_flexible_convex(g, seed=seed)
    if flexible is not None:
        evidence["flexible_configuration"] = _round(flexible.points)
        return ClassificationRecord(label=NOT_CONVEXLY_RIGID, confidence="proved",
                                    evidence=evidence, **flags)
    if witness is not None:
        bad = _rigid_samples(g, seed, sample_count, tol_rank)
        evidence["samples"] = sample_count
        evidence["flexible_samples"] = bad
        if bad == 0:
            return ClassificationRecord(label=CONVEXLY_RIGID_NOT_GLOBAL, confidence="sampled",
                                        evidence=evidence, **flags)
    evidence.setdefault("note", "no certificate, witness or flexible placement found")
    if circuit:
        evidence["samples"] = sample_count
        evidence["super_stable_samples"] = _super_stable_samples(g, seed, sample_count, tol_psd)
    return ClassificationRecord(label=UNKNOWN, confidence="none", evidence=evidence, **flags)


# ---------------------------------------------------------------- census files

@dataclass(frozen=True)
class CensusReport:
    n: int
    records: tuple[ClassificationRecord, ...]
    path: str | None = None

    @property
    def counts(self) -> dict:
        out = {c: 0 for c in CLASSES}
        for r in self.records:
            out[r.label] += 1
        return out

    def by_class(self) -> dict:
        out = {c: [] for c in CLASSES}
        for r in self.records:
            out[r.label].append(r.graph)
        return out

    def summary(self) -> dict:
        return {"n": self.n, "circuits": len(self.records), "counts": self.counts,
                "classes": {c: [str(g) for g in gs] for c, gs in self.by_class().items()}}


def _classify_job(args):
    g, seed, samples, budget, tol_rank, tol_psd = args
    return classify(g, seed=seed, sample_count=samples, budget=budget, tol_rank=tol_rank, tol_psd=tol_psd)


def census_report(n: int, out_dir: str | None = ".", seed: int = 0, sample_count: int = 50,
                  budget: int = 4000, tol_rank: float = TOL_RANK, tol_psd: float = TOL_PSD,
                  workers: int = 1) -> CensusReport:
    """Classify every circuit on n vertices and write ``census_n{n}.jsonl`` into ``out_dir``.

    Records are written in canonical order whatever the worker count, so the
    file is byte-identical for identical arguments.
    """
    graphs = enumerate_circuits(n)
    jobs = [(g, seed, sample_count, budget, tol_rank, tol_psd) for g in graphs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_classify_job, jobs))
    else:
        records = [_classify_job(j) for j in jobs]
    path = None
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, f"census_n{n}.jsonl")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for r in records:
                fh.write(r.to_json() + "\n")
    return CensusReport(n, tuple(records), path)


def load_census(path: str) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


# ---------------------------------------------------------------- the Grünbaum family

GRUNBAUM_BRACES = ((1, 4), (4, 8), (5, 8), (2, 6), (2, 7), (3, 6))
GRUNBAUM_ANGLE = math.radians(60.0)
REGIME_MIDPOINTS = ("inside_circle", "outside_circle", "past_parallel", "nonconvex")
REGIMES = ("flat_7", "inside_circle", "concyclic", "outside_circle", "parallel", "past_parallel",
           "flat_8", "nonconvex", "unstressed_67")


def grunbaum_graph() -> BracedPolygonGraph:
    return BracedPolygonGraph.from_labels(8, GRUNBAUM_BRACES)


def grunbaum_points(t: float, phi: float = GRUNBAUM_ANGLE) -> np.ndarray:
    """Four-fold symmetric octagon: even vertices on the unit circle, vertex 7 at t(cos phi, sin phi)."""
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    p = np.zeros((8, 2))
    p[[1, 3, 5, 7]] = [(-1.0, 0.0), (0.0, -1.0), (1.0, 0.0), (0.0, 1.0)]
    q = t * np.array([math.cos(phi), math.sin(phi)])
    for v in (6, 0, 2, 4):
        p[v] = q
        q = rot @ q
    return p


def grunbaum_family(t: float, phi: float = GRUNBAUM_ANGLE) -> Framework:
    return Framework(grunbaum_graph(), grunbaum_points(t, phi))


def _edge_stress(fw, basis):
    g = fw.graph
    w = basis[0]
    k = g.edge_index[(0, 1)]
    w = w * np.sign(w[k])
    return w / np.max(np.abs(w))


def grunbaum_stress(t: float, phi: float = GRUNBAUM_ANGLE) -> np.ndarray:
    """The family's stress, scaled so max |w| = 1 and edge 12 is positive."""
    fw = grunbaum_family(t, phi)
    basis = equilibrium_stresses(fw)
    if basis.shape[0] != 1:
        raise DomainError(f"stress space has dimension {basis.shape[0]} at t = {t}")
    return _edge_stress(fw, basis)


def _omega67(t, phi):
    g = grunbaum_graph()
    return grunbaum_stress(t, phi)[g.edge_index[(5, 6)]]


def grunbaum_thresholds(phi: float = GRUNBAUM_ANGLE) -> dict:
    """Values of t where the qualitative picture changes.

    flat_7: vertex 7 on the segment 68.  concyclic: all vertices on the unit
    circle.  parallel: edge 78 parallel to 26.  flat_8: 7, 8, 1 collinear
    (7 on the circle over diameter 68).  unstressed_67: the boundary edge 67
    loses its stress.
    """
    c, s = math.cos(phi), math.sin(phi)
    out = {"flat_7": 1.0 / (c + s), "concyclic": 1.0, "parallel": 1.0 / s, "flat_8": c + s}
    lo, hi = out["flat_8"] * 1.0001, out["flat_8"]
    f_lo = _omega67(lo, phi)
    step = 0.01
    while True:
        hi = lo + step
        f_hi = _omega67(hi, phi)
        if np.sign(f_hi) != np.sign(f_lo):
            break
        lo, f_lo = hi, f_hi
        if hi > 10.0:
            raise DomainError("no sign change of the stress on edge 67")
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        f_mid = _omega67(mid, phi)
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    out["unstressed_67"] = 0.5 * (lo + hi)
    return out


def grunbaum_rows(phi: float = GRUNBAUM_ANGLE) -> dict:
    """One representative t per regime, in increasing t: the thresholds and the midpoints between them."""
    th = grunbaum_thresholds(phi)
    keys = list(th)
    out = {}
    for a, b, mid in zip(keys, keys[1:], REGIME_MIDPOINTS):
        out[a] = th[a]
        out[mid] = 0.5 * (th[a] + th[b])
    out[keys[-1]] = th[keys[-1]]
    return out


@dataclass(frozen=True)
class ScanRow:
    t: float
    strictly_convex: bool
    convex: bool
    stress: np.ndarray = field(repr=False)
    signs: tuple[int, ...]
    negative: int
    zero: int
    positive: int

    def brace_signs(self, graph) -> dict:
        return {(a + 1, b + 1): self.signs[graph.edge_index[(a, b)]] for a, b in graph.braces}


def grunbaum_row(t: float, phi: float = GRUNBAUM_ANGLE, tol_zero: float = 1e-6,
                 tol_psd: float = TOL_PSD) -> ScanRow:
    fw = grunbaum_family(t, phi)
    w = grunbaum_stress(t, phi)
    signs = tuple(int(0 if abs(x) <= tol_zero else np.sign(x)) for x in w)
    sig = spectral_signature(stress_matrix(fw, w), tol_psd)
    return ScanRow(float(t), is_strictly_convex(fw.points), is_weakly_convex(fw.points),
                   w, signs, sig.negative, sig.zero, sig.positive)


def grunbaum_scan(t_min: float, t_max: float, steps: int, phi: float = GRUNBAUM_ANGLE) -> list[ScanRow]:
    if steps < 1:
        raise DomainError("steps must be positive")
    ts = [t_min] if steps == 1 else np.linspace(t_min, t_max, steps)
    return [grunbaum_row(float(t), phi) for t in ts]


def scan_csv(rows, graph: BracedPolygonGraph | None = None) -> str:
    g = graph or grunbaum_graph()
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    labels = [f"w{a + 1}{b + 1}" for a, b in g.edges]
    wr.writerow(["t", "strictly_convex", "convex"] + labels + ["negative", "zero", "positive"])
    for r in rows:
        wr.writerow([f"{r.t:.10f}", int(r.strictly_convex), int(r.convex)]
                    + [f"{x:.10f}" for x in r.stress] + [r.negative, r.zero, r.positive])
    return buf.getvalue()
