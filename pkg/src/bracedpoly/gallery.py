"""Small named frameworks used by the tests, the CLI examples and the README."""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .construct import push_pull_scaled, search_flexible_convex
from .errors import DomainError
from .linalg import infinitesimal_flexes, is_trivial_motion
from .model import BracedPolygonGraph, Framework

TWIN_OCTAGON_BRACES = ((1, 3), (2, 4), (5, 7), (6, 8), (2, 7), (3, 6))
LENS_BRACES = ((1, 4), (2, 5), (3, 6), (6, 9), (1, 8), (7, 10), (2, 7))
# the brace joining the two arcs; its stress vanishes at the lens placement
LENS_ZERO_BRACE = (2, 7)


def k4_square() -> Framework:
    """Unit square with both diagonals."""
    g = BracedPolygonGraph.from_labels(4, [(1, 3), (2, 4)])
    return Framework(g, [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def regular_polygon(n: int, radius: float = 1.0) -> np.ndarray:
    a = 2.0 * np.pi * np.arange(n) / n
    return radius * np.column_stack([np.cos(a), np.sin(a)])


def pentagon() -> Framework:
    g = BracedPolygonGraph.from_labels(5, [(1, 3), (1, 4), (2, 5)])
    return Framework(g, regular_polygon(5))


def twin_octagon_graph() -> BracedPolygonGraph:
    return BracedPolygonGraph.from_labels(8, TWIN_OCTAGON_BRACES)


@lru_cache(maxsize=1)
def _twin_octagon_base():
    fw = search_flexible_convex(twin_octagon_graph(), seed=0)
    if fw is None:
        raise DomainError("no strictly convex flexible placement found")
    return fw


def twin_octagon_base() -> Framework:
    """Strictly convex octagon with a nontrivial infinitesimal flex."""
    return _twin_octagon_base()


def twin_octagon_pair(scale: float = 0.05) -> tuple[Framework, Framework]:
    """Two strictly convex, non-congruent octagons with equal bar lengths."""
    base = twin_octagon_base()
    flex = next(v for v in infinitesimal_flexes(base) if not is_trivial_motion(base.points, v))
    return push_pull_scaled(base, flex, scale)


def lens_graph() -> BracedPolygonGraph:
    """Minimally 3-connected ten-gon with seven braces: two K33s on six vertices each plus one bridge."""
    return BracedPolygonGraph.from_labels(10, LENS_BRACES)


def lens(h1: float = 0.6, h2: float = 0.9) -> Framework:
    """Ten-gon with vertices 1..6 on one circle and 6..10, 1 on another.

    Both circles pass through (-1, 0) and (1, 0); vertices 2..5 sit on the lower
    arc, 7..10 on the upper one, at uneven spacings.
    """
    r1 = math.hypot(1.0, h1)
    r2 = math.hypot(1.0, h2)
    lo0 = math.atan2(-h1, -1.0)
    lo1 = math.atan2(-h1, 1.0) + 2 * math.pi if math.atan2(-h1, 1.0) < lo0 else math.atan2(-h1, 1.0)
    lower = [lo0 + (lo1 - lo0) * f for f in (0.0, 0.17, 0.4, 0.63, 0.85, 1.0)]
    up0 = math.atan2(h2, 1.0)
    up1 = math.atan2(h2, -1.0)
    upper = [up0 + (up1 - up0) * f for f in (0.2, 0.45, 0.62, 0.8)]
    pts = [(r1 * math.cos(a), h1 + r1 * math.sin(a)) for a in lower]
    pts += [(r2 * math.cos(a), -h2 + r2 * math.sin(a)) for a in upper]
    return Framework(lens_graph(), pts)


def plates(n: int) -> BracedPolygonGraph:
    """Zig-zag strip of triangles plus one brace from the first apex to the last.

    The strip triangulates the polygon with chords (2, n), (2, n-1), (3, n-1), ...
    """
    if n < 5:
        raise DomainError("plates need at least five vertices")
    chords = []
    lo, hi = 2, n
    step_lo = True
    while hi - lo > 1:
        chords.append((lo, hi))
        if step_lo:
            hi -= 1
        else:
            lo += 1
        step_lo = not step_lo
    chords = [c for c in chords if abs(c[0] - c[1]) % n not in (1, n - 1)]
    # the last triangle's apex is the vertex between the final chord's ends
    a, b = chords[-1]
    apex = a + 1 if b - a == 2 else b - 1
    return BracedPolygonGraph.from_labels(n, chords + [(1, apex)])
