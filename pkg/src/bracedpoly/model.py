"""Braced polygon graphs, planar configurations and frameworks.

Vertices are 0-based inside the library.  Everything a user reads or writes
(JSON files, CLI output, ``labels()``) is 1-based.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateConfigurationError,
    GraphError,
    GraphMismatchError,
    NotConvexError,
)

TOL_GEOM = 1e-9


def is_boundary_pair(n: int, i: int, j: int) -> bool:
    d = abs(i - j)
    return d == 1 or d == n - 1


def chords_cross(a: tuple[int, int], b: tuple[int, int]) -> bool:
    """True when two chords of the cycle interleave (cross in the interior).

    Purely combinatorial; chords sharing an endpoint never cross.
    """
    i, j = sorted(a)
    k, l = sorted(b)
    if len({i, j, k, l}) < 4:
        return False
    return (i < k < j) != (i < l < j)


@dataclass(frozen=True)
class BracedPolygonGraph:
    """Cycle 0..n-1 plus a set of interior chords (braces), 0-based."""

    n: int
    braces: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 3:
            raise GraphError(f"need an integer n >= 3, got {n!r}")
        object.__setattr__(self, "n", int(n))
        seen = set()
        for b in self.braces:
            if len(b) != 2:
                raise GraphError(f"brace {b!r} is not a vertex pair")
            i, j = sorted((int(b[0]), int(b[1])))
            if i < 0 or j >= n:
                raise GraphError(f"brace ({i + 1},{j + 1}) out of range 1..{n}")
            if i == j or is_boundary_pair(n, i, j):
                raise GraphError(f"({i + 1},{j + 1}) is a boundary pair, not a brace")
            if (i, j) in seen:
                raise GraphError(f"duplicate brace ({i + 1},{j + 1})")
            seen.add((i, j))
        object.__setattr__(self, "braces", tuple(sorted(seen)))

    @classmethod
    def from_labels(cls, n: int, braces: Iterable[Sequence[int]]) -> "BracedPolygonGraph":
        """Build from 1-based brace labels, e.g. ``from_labels(5, [(1, 3), (1, 4), (2, 5)])``."""
        out = []
        for b in braces:
            if len(b) != 2:
                raise GraphError(f"brace {b!r} is not a vertex pair")
            i, j = int(b[0]), int(b[1])
            if not (1 <= i <= n and 1 <= j <= n):
                raise GraphError(f"brace ({i},{j}) out of range 1..{n}")
            out.append((i - 1, j - 1))
        return cls(n, tuple(out))

    @classmethod
    def cycle(cls, n: int) -> "BracedPolygonGraph":
        return cls(n, ())

    def labels(self) -> list[list[int]]:
        return [[i + 1, j + 1] for i, j in self.braces]

    def __str__(self):
        body = " ".join(f"{i + 1}-{j + 1}" for i, j in self.braces)
        return f"n={self.n} [{body}]"

    @property
    def m(self) -> int:
        return self.n + len(self.braces)

    @cached_property
    def boundary_edges(self) -> tuple[tuple[int, int], ...]:
        n = self.n
        return tuple(tuple(sorted((i, (i + 1) % n))) for i in range(n))

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Canonical edge order: boundary edge i joins i and i+1 (mod n), then braces."""
        return self.boundary_edges + self.braces

    @cached_property
    def edge_array(self) -> np.ndarray:
        a = np.array(self.edges, dtype=np.intp).reshape(-1, 2)
        a.setflags(write=False)
        return a

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: k for k, e in enumerate(self.edges)}

    @cached_property
    def brace_set(self) -> frozenset:
        return frozenset(self.braces)

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edge_index

    def is_brace_index(self, k: int) -> bool:
        return k >= self.n

    @cached_property
    def adjacency(self) -> tuple[int, ...]:
        """Neighbour sets as bitmasks."""
        adj = [0] * self.n
        for i, j in self.edges:
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        return tuple(adj)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(bin(a).count("1") for a in self.adjacency)

    def degree(self, v: int) -> int:
        return self.degrees[v]

    def with_braces(self, extra: Iterable[tuple[int, int]]) -> "BracedPolygonGraph":
        return BracedPolygonGraph(self.n, self.braces + tuple(extra))

    def without_braces(self, drop: Iterable[tuple[int, int]]) -> "BracedPolygonGraph":
        drop = {tuple(sorted(b)) for b in drop}
        missing = drop - self.brace_set
        if missing:
            raise GraphError(f"not braces of the graph: {sorted(missing)}")
        return BracedPolygonGraph(self.n, tuple(b for b in self.braces if b not in drop))

    def relabel(self, shift: int = 0, reflect: bool = False) -> "BracedPolygonGraph":
        """Dihedral relabelling v -> (±v + shift) mod n."""
        n = self.n
        if reflect:
            f = lambda v: (shift - v) % n
        else:
            f = lambda v: (v + shift) % n
        return BracedPolygonGraph(n, tuple((f(i), f(j)) for i, j in self.braces))

    def crossing_braces(self, chord: tuple[int, int]) -> list[tuple[int, int]]:
        return [b for b in self.braces if chords_cross(b, chord)]


def all_chords(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i, j in combinations(range(n), 2) if not is_boundary_pair(n, i, j)]


def _as_points(points) -> np.ndarray:
    p = np.array(points, dtype=float)
    if p.ndim != 2 or p.shape[1] != 2:
        raise DegenerateConfigurationError(f"expected an (n, 2) array of points, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise DegenerateConfigurationError("coordinates must be finite")
    p.setflags(write=False)
    return p


@dataclass(frozen=True, eq=False)
class Framework:
    """A braced polygon graph with one planar point per vertex."""

    graph: BracedPolygonGraph
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = _as_points(self.points)
        if p.shape[0] != self.graph.n:
            raise GraphMismatchError(f"{p.shape[0]} points for a graph on {self.graph.n} vertices")
        object.__setattr__(self, "points", p)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def edges(self) -> np.ndarray:
        return self.graph.edge_array

    def moved(self, points) -> "Framework":
        return Framework(self.graph, points)

    def __eq__(self, other):
        return (isinstance(other, Framework) and self.graph == other.graph
                and np.array_equal(self.points, other.points))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class BarFramework:
    """Points plus an arbitrary edge list; used for sub-frameworks of superpositions."""

    points: np.ndarray = field(repr=False)
    edges: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = _as_points(self.points)
        e = np.array(self.edges, dtype=np.intp).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= p.shape[0]):
            raise GraphError("edge endpoint out of range")
        e.setflags(write=False)
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "edges", e)

    @property
    def n(self) -> int:
        return self.points.shape[0]


def points_of(obj) -> np.ndarray:
    if isinstance(obj, (Framework, BarFramework)):
        return obj.points
    return _as_points(obj)


# ---------------------------------------------------------------- convexity

def _edge_vectors(p: np.ndarray) -> np.ndarray:
    e = np.roll(p, -1, axis=0) - p
    if np.any(np.all(e == 0.0, axis=1)):
        k = int(np.flatnonzero(np.all(e == 0.0, axis=1))[0])
        raise DegenerateConfigurationError(
            f"vertices {k + 1} and {(k + 1) % len(p) + 1} coincide")
    return e


def signed_area(points) -> float:
    p = points_of(points)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def orientation(points) -> int:
    """+1 counterclockwise, -1 clockwise, 0 for zero signed area."""
    a = signed_area(points)
    return (a > 0) - (a < 0)


def turning_angles(points) -> np.ndarray:
    """Signed turn from edge i to edge i+1, measured at vertex i+1."""
    p = points_of(points)
    e = _edge_vectors(p)
    f = np.roll(e, -1, axis=0)
    cross = e[:, 0] * f[:, 1] - e[:, 1] * f[:, 0]
    dot = np.einsum("ij,ij->i", e, f)
    return np.arctan2(cross, dot)


def convexity_margins(points) -> np.ndarray:
    """Cross products at each vertex, oriented so positive means convex, divided by L²."""
    p = points_of(points)
    if p.shape[0] < 3:
        raise DegenerateConfigurationError("need at least 3 points")
    e = _edge_vectors(p)
    f = np.roll(e, -1, axis=0)
    cross = e[:, 0] * f[:, 1] - e[:, 1] * f[:, 0]
    s = orientation(p) or 1
    L2 = float(np.max(np.einsum("ij,ij->i", e, e)))
    return s * cross / L2


def is_strictly_convex(points, tol_geom: float = TOL_GEOM) -> bool:
    """Strict convexity of the boundary polygon in label order, either orientation."""
    p = points_of(points)
    margins = convexity_margins(p)
    if orientation(p) == 0 or np.any(margins <= tol_geom):
        return False
    total = float(np.sum(turning_angles(p))) * orientation(p)
    return abs(total - 2 * math.pi) < 1e-6


def is_weakly_convex(points, tol_geom: float = TOL_GEOM) -> bool:
    """Convex with flat vertices allowed (no reflex vertex, turning 2π)."""
    p = points_of(points)
    margins = convexity_margins(p)
    if orientation(p) == 0 or np.any(margins < -tol_geom):
        return False
    total = float(np.sum(turning_angles(p))) * orientation(p)
    return abs(total - 2 * math.pi) < 1e-6


@dataclass(frozen=True, eq=False)
class TurnAngleProfile:
    """Cumulative edge direction angles with theta[0] = 0 (edge k joins k and k+1)."""

    theta: np.ndarray

    @property
    def n(self) -> int:
        return len(self.theta)

    def at(self, i: int) -> float:
        """theta extended to all integers by theta[i + n] = theta[i] + 2π."""
        q, r = divmod(i, self.n)
        return float(self.theta[r]) + 2 * math.pi * q

    def gaps(self) -> np.ndarray:
        return np.diff(np.append(self.theta, 2 * math.pi))


def turn_angle_profile(points, tol_geom: float = TOL_GEOM) -> TurnAngleProfile:
    p = points_of(points)
    if not is_strictly_convex(p, tol_geom):
        raise NotConvexError("turn angle profile needs a strictly convex polygon")
    tau = turning_angles(p) * orientation(p)
    theta = np.concatenate(([0.0], np.cumsum(tau[:-1])))
    theta.setflags(write=False)
    return TurnAngleProfile(theta)


def edge_direction(points, k: int = 0) -> float:
    p = points_of(points)
    d = p[(k + 1) % len(p)] - p[k]
    return math.atan2(d[1], d[0])


# ---------------------------------------------------------------- lengths

def edge_lengths(framework) -> np.ndarray:
    p = framework.points
    e = framework.edges
    return np.linalg.norm(p[e[:, 0]] - p[e[:, 1]], axis=1)


def _same_graph(f1, f2):
    g1 = getattr(f1, "graph", None)
    g2 = getattr(f2, "graph", None)
    if g1 is not None and g2 is not None:
        if g1 != g2:
            raise GraphMismatchError("frameworks have different graphs")
    elif not np.array_equal(f1.edges, f2.edges):
        raise GraphMismatchError("frameworks have different edge lists")


def lengths_equal(f1, f2, tol: float = 1e-10) -> bool:
    """Corresponding edges agree to relative tolerance ``tol``."""
    _same_graph(f1, f2)
    a, b = edge_lengths(f1), edge_lengths(f2)
    return bool(np.all(np.abs(a - b) <= tol * np.maximum(a, b)))


def pairwise_distances(points) -> np.ndarray:
    p = points_of(points)
    i, j = np.triu_indices(len(p), 1)
    return np.linalg.norm(p[i] - p[j], axis=1)


def are_congruent(f1, f2, tol: float = 1e-9) -> bool:
    """Label-preserving congruence: every pairwise distance agrees (relative to the diameter)."""
    p, q = points_of(f1), points_of(f2)
    if p.shape != q.shape:
        raise GraphMismatchError("configurations have different sizes")
    dp, dq = pairwise_distances(p), pairwise_distances(q)
    scale = max(float(dp.max(initial=0.0)), float(dq.max(initial=0.0)), 1e-300)
    return bool(np.all(np.abs(dp - dq) <= tol * scale))


# ---------------------------------------------------------------- JSON

def graph_to_dict(g: BracedPolygonGraph) -> dict:
    return {"n": g.n, "braces": g.labels()}


def _graph_from_dict(d: dict) -> BracedPolygonGraph:
    if not isinstance(d, dict) or "n" not in d:
        raise GraphError("graph JSON needs an 'n' field")
    n = d["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise GraphError("'n' must be an integer")
    braces = d.get("braces", [])
    if not isinstance(braces, list):
        raise GraphError("'braces' must be a list of pairs")
    for b in braces:
        if (not isinstance(b, list) or len(b) != 2
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in b)):
            raise GraphError(f"brace {b!r} is not a pair of integer labels")
    return BracedPolygonGraph.from_labels(n, braces)


def graph_from_dict(d: dict) -> BracedPolygonGraph:
    return _graph_from_dict(d)


def framework_to_dict(f: Framework) -> dict:
    d = graph_to_dict(f.graph)
    d["coords"] = [[float(x), float(y)] for x, y in f.points]
    return d


def framework_from_dict(d: dict) -> Framework:
    g = _graph_from_dict(d)
    coords = d.get("coords")
    if not isinstance(coords, list) or len(coords) != g.n:
        raise GraphError(f"'coords' must list {g.n} points")
    for c in coords:
        if not isinstance(c, list) or len(c) != 2 or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in c):
            raise GraphError(f"bad coordinate {c!r}")
    return Framework(g, coords)


def to_json(obj) -> str:
    if isinstance(obj, Framework):
        d = framework_to_dict(obj)
    elif isinstance(obj, BracedPolygonGraph):
        d = graph_to_dict(obj)
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")
    return json.dumps(d)


def from_json(text: str):
    """Parse a graph, or a framework when ``coords`` is present."""
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"invalid JSON: {exc}") from None
    if isinstance(d, dict) and "coords" in d:
        return framework_from_dict(d)
    return graph_from_dict(d)
