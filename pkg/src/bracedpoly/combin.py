"""Exact combinatorics of braced polygon graphs.

Chord crossing is always combinatorial (interleaving endpoints on the cycle).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from . import kernels
from .errors import DomainError, GraphError, NotConnectedError
from .model import BracedPolygonGraph, chords_cross, is_boundary_pair


# ---------------------------------------------------------------- connectivity

def _nx_graph(graph: BracedPolygonGraph):
    import networkx as nx

    g = nx.Graph()
    g.add_nodes_from(range(graph.n))
    g.add_edges_from(graph.edges)
    return g


def is_k_connected(graph: BracedPolygonGraph, k: int, method: str = "cut") -> bool:
    """No set of fewer than k vertices disconnects the graph.

    ``method="cut"`` enumerates vertex sets, ``method="flow"`` uses max-flow
    vertex connectivity (networkx).  Both must agree.
    """
    if graph.n <= k:
        raise DomainError(f"{k}-connectivity is undefined for n = {graph.n} <= k")
    if method == "cut":
        return kernels.is_k_connected_cut(graph.adjacency, graph.n, k)
    if method == "flow":
        import networkx as nx

        return nx.node_connectivity(_nx_graph(graph)) >= k
    raise ValueError(f"unknown method {method!r}")


def is_3_connected(graph: BracedPolygonGraph) -> bool:
    return graph.n > 3 and kernels.is_k_connected_cut(graph.adjacency, graph.n, 3)


def two_vertex_cuts(graph: BracedPolygonGraph) -> list[tuple[int, int]]:
    return kernels.two_cuts(graph.adjacency, graph.n)


@dataclass(frozen=True)
class Verdict:
    """A boolean with an explanation; truthy exactly when ``holds``."""

    holds: bool
    reason: str = ""
    witness: tuple = ()

    def __bool__(self):
        return self.holds


def minimality_report(graph: BracedPolygonGraph) -> Verdict:
    if graph.n < 4 or not is_3_connected(graph):
        return Verdict(False, "graph is not 3-connected")
    for b in graph.braces:
        if is_3_connected(graph.without_braces([b])):
            return Verdict(False, f"removing brace {b[0] + 1}-{b[1] + 1} keeps 3-connectivity", b)
    return Verdict(True, "every brace removal breaks 3-connectivity")


def is_minimally_3_connected(graph: BracedPolygonGraph) -> bool:
    return minimality_report(graph).holds


def removable_braces(graph: BracedPolygonGraph) -> list[tuple[int, int]]:
    """Braces whose removal keeps the graph 3-connected."""
    return [b for b in graph.braces if is_3_connected(graph.without_braces([b]))]


def spanning_minimal_subgraph(graph: BracedPolygonGraph) -> BracedPolygonGraph:
    """Greedily drop braces (in sorted order) while 3-connectivity survives."""
    if not is_3_connected(graph):
        raise NotConnectedError("graph is not 3-connected")
    g = graph
    changed = True
    while changed:
        changed = False
        for b in g.braces:
            h = g.without_braces([b])
            if is_3_connected(h):
                g = h
                changed = True
                break
    return g


# ---------------------------------------------------------------- circuits

def _endpoints(edges):
    return [e[0] for e in edges], [e[1] for e in edges]


def is_23_sparse(n: int, edges) -> bool:
    eu, ev = _endpoints(edges)
    return kernels.pebble_rank(n, eu, ev) == len(edges)


def is_generic_rigidity_circuit(graph: BracedPolygonGraph, method: str = "pebble") -> bool:
    """m = 2n - 2 and every proper subgraph on k >= 2 vertices has at most 2k - 3 edges.

    ``pebble`` runs the (2,3) pebble game on G - e for every edge e;
    ``subsets`` counts induced edges over all proper vertex subsets.
    """
    n, edges = graph.n, list(graph.edges)
    if len(edges) != 2 * n - 2:
        return False
    if method == "pebble":
        for k in range(len(edges)):
            if not is_23_sparse(n, edges[:k] + edges[k + 1:]):
                return False
        return True
    if method == "subsets":
        eu, ev = _endpoints(edges)
        return kernels.max_subset_excess(n, eu, ev, True) <= 0
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------- unique interval property

def _interval(n, start, k):
    return [(start + t) % n for t in range(k)]


def _uip_conditions(graph: BracedPolygonGraph, start: int, k: int) -> bool:
    n = graph.n
    inside = _interval(n, start, k)
    in_set = set(inside)
    deg = graph.degrees
    # A 4-cycle has no vertex of degree 4; there the fan condition alone is used.
    min_deg = 3 if n == 4 else 4
    for v in inside:
        if deg[v] < min_deg or not graph.has_edge((v - 1) % n, (v + 1) % n):
            return False
    allowed = (min((start - 1) % n, (start + 1) % n), max((start - 1) % n, (start + 1) % n))
    for v in range(n):
        if v not in in_set and deg[v] != 3:
            return False
    links = []
    for b in graph.braces:
        a_in, b_in = b[0] in in_set, b[1] in in_set
        if not a_in and not b_in and not (k == 1 and b == allowed):
            return False
        if a_in != b_in:
            links.append(b)
    for e, f in combinations(links, 2):
        if chords_cross(e, f):
            x = e[0] if e[0] in in_set else e[1]
            y = f[0] if f[0] in in_set else f[1]
            if not is_boundary_pair(n, x, y):
                return False
    return True


def unique_interval_property(graph: BracedPolygonGraph) -> Verdict:
    """Search every cyclic interval I for the unique interval property.

    The verdict's ``witness`` is the interval (0-based vertices in cycle order).
    """
    n = graph.n
    for k in range(1, n + 1):
        for start in range(n if k < n else 1):
            if _uip_conditions(graph, start, k):
                return Verdict(True, f"interval of length {k}", tuple(_interval(n, start, k)))
    return Verdict(False, "no interval satisfies the three conditions")


# ---------------------------------------------------------------- dual polygons

@dataclass(frozen=True)
class DualPolygon:
    base: BracedPolygonGraph
    dual_braces: dict = field(hash=False)

    @property
    def graph(self) -> BracedPolygonGraph:
        return BracedPolygonGraph(self.base.n, tuple(self.dual_braces[b] for b in self.base.braces))


def dual_polygon(graph: BracedPolygonGraph) -> DualPolygon:
    """Pick, for every brace e, the lexicographically least 2-vertex cut of G - e."""
    duals = {}
    for b in graph.braces:
        cuts = two_vertex_cuts(graph.without_braces([b]))
        if not cuts:
            raise DomainError(
                f"no 2-vertex cut after removing brace {b[0] + 1}-{b[1] + 1}; "
                "graph is not minimally 3-connected")
        duals[b] = cuts[0]
    for d in duals.values():
        crossed = [b for b in graph.braces if chords_cross(b, d)]
        if len(crossed) != 1:
            raise DomainError(f"dual brace {d} crosses {len(crossed)} braces")
    return DualPolygon(graph, duals)


def _segment_count(chords, segment: set) -> int:
    return sum(1 for a, b in chords if a in segment and b in segment)


@dataclass
class DualReport:
    checks: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def dual_invariant_suite(graph: BracedPolygonGraph) -> DualReport:
    """Check the four structural facts about minimally 3-connected circuits and their duals."""
    if not (is_generic_rigidity_circuit(graph) and is_minimally_3_connected(graph)):
        raise DomainError("needs a minimally 3-connected braced polygonal circuit")
    n = graph.n
    rep = DualReport()
    dual = dual_polygon(graph)
    dg = dual.graph

    # segment bound on dual braces
    count = 0
    for k in range(2, n):
        for s in range(n):
            seg = set(_interval(n, s, k))
            count += 1
            if _segment_count(dg.braces, seg) > k - 2:
                rep.violations.append(f"segment {sorted(v + 1 for v in seg)} holds more than {k - 2} dual braces")
    rep.checks["segment_bound"] = count

    # the dual polygon is 3-connected
    rep.checks["dual_3_connected"] = 1
    if not is_3_connected(dg):
        rep.violations.append("dual polygon is not 3-connected")

    # degree-3 vertices form one cyclic run
    low = [graph.degree(v) == 3 for v in range(n)]
    runs = sum(1 for v in range(n) if low[v] and not low[v - 1])
    rep.checks["degree3_consecutive"] = 1
    if runs > 1 or (runs == 0 and any(low) and not all(low)):
        rep.violations.append("degree-3 vertices are not consecutive")

    # fan pattern: segment {n,1..k,k+1} with k braces and inner degrees >= 4
    applied = 0
    for r in range(n):
        for k in range(1, n - 1):
            seg = [(r + t) % n for t in range(-1, k + 1)]
            if len(set(seg)) < k + 2:
                continue
            inner = seg[1:-1]
            if _segment_count(graph.braces, set(seg)) != k:
                continue
            if any(graph.degree(v) < 4 for v in inner):
                continue
            applied += 1
            for t in range(k):
                a, b = seg[t], seg[t + 2]
                if not graph.has_edge(a, b):
                    rep.violations.append(
                        f"fan brace {a + 1}-{b + 1} missing for segment {[v + 1 for v in seg]}")
    rep.checks["fan_pattern_applied"] = applied
    return rep


# ---------------------------------------------------------------- construction sequences

@dataclass(frozen=True)
class ConstructionStep:
    """One brace addition, in the target graph's labels.

    op 1: subdivide ``split_edges[0]`` with ``new_vertices[0]`` and join it to another vertex.
    op 2: subdivide two boundary edges and join the two new vertices.
    op 3: add a brace between existing vertices.
    """

    op: int
    brace: tuple[int, int]
    new_vertices: tuple[int, ...] = ()
    split_edges: tuple[tuple[int, int], ...] = ()

    def describe(self) -> str:
        b = f"{self.brace[0] + 1}-{self.brace[1] + 1}"
        if self.op == 3:
            return f"op3 add brace {b}"
        nv = ",".join(str(v + 1) for v in self.new_vertices)
        se = ",".join(f"{a + 1}-{c + 1}" for a, c in self.split_edges)
        return f"op{self.op} subdivide {se} with {nv}; add brace {b}"


@dataclass(frozen=True)
class ConstructionSequence:
    n: int
    base: tuple[int, int, int, int]
    steps: tuple[ConstructionStep, ...]

    def stages(self):
        """Yield (vertex labels in cycle order, braces in those labels) before each step and at the end."""
        verts = list(self.base)
        braces = {(self.base[0], self.base[2]), (self.base[1], self.base[3])}
        yield tuple(verts), frozenset(braces)
        for st in self.steps:
            for (a, c), v in zip(st.split_edges, st.new_vertices):
                k = len(verts)
                pos = [t for t in range(k) if {verts[t], verts[(t + 1) % k]} == {a, c}]
                if len(pos) != 1:
                    raise DomainError(f"{a + 1}-{c + 1} is not a boundary edge at this stage")
                verts.insert(pos[0] + 1, v)
            b = tuple(sorted(st.brace))
            if b in braces:
                raise DomainError(f"brace {b[0] + 1}-{b[1] + 1} added twice")
            if b[0] not in verts or b[1] not in verts:
                raise DomainError("brace endpoint missing")
            braces.add(b)
            yield tuple(verts), frozenset(braces)

    def replay(self) -> BracedPolygonGraph:
        *_, (verts, braces) = self.stages()
        r = verts.index(0) if 0 in verts else 0
        if list(verts[r:] + verts[:r]) != list(range(self.n)):
            raise DomainError("replay does not visit the vertices in cycle order")
        return BracedPolygonGraph(self.n, tuple(braces))

    def intermediate_graphs(self) -> list[BracedPolygonGraph]:
        return [_compact(verts, braces) for verts, braces in self.stages()]

    @property
    def ops(self) -> tuple[int, ...]:
        return tuple(st.op for st in self.steps)


def _compact(verts, braces) -> BracedPolygonGraph:
    idx = {v: t for t, v in enumerate(verts)}
    return BracedPolygonGraph(len(verts), tuple((idx[a], idx[b]) for a, b in braces))


def _valid_state(verts, braces):
    try:
        g = _compact(verts, braces)
    except GraphError:
        return None
    return g if is_3_connected(g) else None


def _reverse_moves(verts, braces, allow_op3):
    """Yield (step, previous state) pairs that undo one operation."""
    k = len(verts)
    g = _compact(verts, braces)
    pos = {v: t for t, v in enumerate(verts)}
    for b in sorted(braces):
        x, y = b
        low = [v for v in (x, y) if g.degree(pos[v]) == 3]
        if len(low) == 2 and k - 2 >= 4:
            rest = [v for v in verts if v not in (x, y)]
            prev = (tuple(rest), braces - {b})
            if _valid_state(*prev) is not None:
                split = []
                for v in (x, y):
                    t = pos[v]
                    a, c = verts[t - 1], verts[(t + 1) % k]
                    a = a if a not in (x, y) else verts[t - 2]
                    c = c if c not in (x, y) else verts[(t + 2) % k]
                    split.append((a, c))
                yield ConstructionStep(2, b, (x, y), tuple(split)), prev
        for v in low:
            if k - 1 < 4:
                continue
            rest = tuple(u for u in verts if u != v)
            prev = (rest, braces - {b})
            if _valid_state(*prev) is not None:
                t = pos[v]
                yield ConstructionStep(1, b, (v,), ((verts[t - 1], verts[(t + 1) % k]),)), prev
    if allow_op3:
        for b in sorted(braces):
            prev = (verts, braces - {b})
            if _valid_state(*prev) is not None:
                yield ConstructionStep(3, b), prev


def construction_sequence(graph: BracedPolygonGraph) -> ConstructionSequence:
    """Build ``graph`` from K4 one brace at a time through 3-connected graphs.

    Removable braces are stripped first (they become trailing op3 steps), the
    remaining minimally 3-connected graph is reduced with ops 1 and 2 by
    depth-first search.
    """
    if graph.n < 4 or not is_3_connected(graph):
        raise NotConnectedError("construction sequences need a 3-connected graph with n >= 4")
    core = spanning_minimal_subgraph(graph)
    tail = [ConstructionStep(3, b) for b in sorted(set(graph.braces) - set(core.braces))]

    failed = set()

    def search(verts, braces):
        if len(verts) == 4:
            return [] if len(braces) == 2 else None
        key = (verts, braces)
        if key in failed:
            return None
        for step, prev in _reverse_moves(verts, braces, allow_op3=False):
            rest = search(*prev)
            if rest is not None:
                return rest + [step]
        failed.add(key)
        return None

    start = (tuple(range(graph.n)), frozenset(core.braces))
    found = search(*start)
    if found is None:
        # fall back to allowing op3 anywhere
        failed.clear()

        def search3(verts, braces):
            if len(verts) == 4:
                return [] if len(braces) == 2 else None
            key = (verts, braces)
            if key in failed:
                return None
            for step, prev in _reverse_moves(verts, braces, allow_op3=True):
                rest = search3(*prev)
                if rest is not None:
                    return rest + [step]
            failed.add(key)
            return None

        found = search3(tuple(range(graph.n)), frozenset(graph.braces))
        tail = []
        if found is None:
            raise DomainError("no construction sequence found")
    steps = found + tail
    base = _base_of(graph.n, steps)
    seq = ConstructionSequence(graph.n, base, tuple(steps))
    return seq


def _base_of(n, steps):
    verts = set(range(n))
    for st in steps:
        verts -= set(st.new_vertices)
    if len(verts) != 4:
        raise DomainError("construction does not start from four vertices")
    return tuple(sorted(verts))


# ---------------------------------------------------------------- canonical forms

def canonical_braces(n: int, braces) -> tuple[tuple[int, int], ...]:
    """Lexicographically least sorted brace tuple over the 2n dihedral relabellings."""
    best = None
    for s in range(n):
        for refl in (False, True):
            if refl:
                mapped = [((s - i) % n, (s - j) % n) for i, j in braces]
            else:
                mapped = [((i + s) % n, (j + s) % n) for i, j in braces]
            cand = tuple(sorted((a, b) if a < b else (b, a) for a, b in mapped))
            if best is None or cand < best:
                best = cand
    return best


def canonical_form(graph: BracedPolygonGraph) -> BracedPolygonGraph:
    return BracedPolygonGraph(graph.n, canonical_braces(graph.n, graph.braces))
