"""Deterministic SVG drawings of braced polygon frameworks."""
from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .linalg import sign_pattern
from .model import Framework


@dataclass(frozen=True)
class RenderStyle:
    """Edge styling: colour by edge kind, dash by stress sign.

    Boundary edges are black and braces blue.  Positive stress is dashed and
    negative stress solid; zero-stress edges are left out.  Without a stress
    every edge is drawn solid gray.  Red edges use their own colour.
    """

    size: int = 600
    margin: float = 0.05
    boundary: str = "#000000"
    brace: str = "#1f4fbf"
    red: str = "#d62728"
    neutral: str = "#888888"
    dash: str = "8,5"
    width: float = 2.0
    vertex_radius: float = 4.0
    font_size: int = 14
    sign_tol: float = 1e-8

    def edge_style(self, is_brace: bool, sign: str | None, red: bool = False):
        """(colour, dasharray or None), or None when the edge is not drawn."""
        if sign is None:
            return self.red if red else self.neutral, None
        if sign == "0":
            return None
        colour = self.red if red else self.brace if is_brace else self.boundary
        return colour, self.dash if sign == "+" else None


def _fmt(x: float) -> str:
    s = f"{round(float(x), 6):.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def render_svg(framework: Framework, stress=None, red_edges=(), style: RenderStyle | None = None) -> str:
    """SVG text for the framework, styled by the signs of ``stress`` (canonical edge order).

    ``red_edges`` holds 0-based vertex pairs drawn in the red colour.
    """
    st = style or RenderStyle()
    g = framework.graph
    p = np.asarray(framework.points, dtype=float)
    lo, hi = p.min(axis=0), p.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1])) or 1.0
    inner = st.size * (1.0 - 2.0 * st.margin)
    k = inner / span
    centre = (lo + hi) / 2.0
    # flip y so the picture has the usual orientation
    xy = np.column_stack([st.size / 2.0 + k * (p[:, 0] - centre[0]),
                          st.size / 2.0 - k * (p[:, 1] - centre[1])])
    signs = sign_pattern(stress, st.sign_tol) if stress is not None else [None] * g.m
    if len(signs) != g.m:
        raise ValueError(f"stress has {len(signs)} entries, graph has {g.m} edges")
    red = {tuple(sorted(e)) for e in red_edges}

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{st.size}" height="{st.size}" '
           f'viewBox="0 0 {st.size} {st.size}">',
           f'<rect x="0" y="0" width="{st.size}" height="{st.size}" fill="#ffffff"/>']
    for idx, (a, b) in enumerate(g.edges):
        s = st.edge_style(idx >= g.n, signs[idx], (a, b) in red)
        if s is None:
            continue
        colour, dash = s
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<line x1="{_fmt(xy[a, 0])}" y1="{_fmt(xy[a, 1])}" x2="{_fmt(xy[b, 0])}" '
                   f'y2="{_fmt(xy[b, 1])}" stroke="{colour}" stroke-width="{_fmt(st.width)}"{extra}>'
                   f'<title>{a + 1}-{b + 1}</title></line>')
    for v in range(g.n):
        x, y = xy[v]
        out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(st.vertex_radius)}" fill="#000000"/>')
        out.append(f'<text x="{_fmt(x + 6)}" y="{_fmt(y - 6)}" font-family="sans-serif" '
                   f'font-size="{st.font_size}">{escape(str(v + 1))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
