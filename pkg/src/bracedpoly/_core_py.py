"""Pure Python versions of the hot kernels.

Same signatures and results as the compiled ``_core`` module; used when the
extension is not built.  Graphs are passed as neighbour bitmasks or as two
parallel endpoint sequences.
"""
from itertools import combinations

import numpy as np


def connected_without(adj, n, removed):
    """Is the graph minus the vertex set ``removed`` (bitmask) connected?"""
    full = ((1 << n) - 1) & ~removed
    if full == 0:
        return True
    seen = full & -full
    frontier = seen
    while frontier:
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= adj[low.bit_length() - 1]
            f ^= low
        nxt &= full & ~seen
        seen |= nxt
        frontier = nxt
    return seen == full


def is_k_connected_cut(adj, n, k):
    """No vertex set of size < k disconnects the graph (exhaustive)."""
    for size in range(k):
        for cut in combinations(range(n), size):
            mask = 0
            for v in cut:
                mask |= 1 << v
            if not connected_without(adj, n, mask):
                return False
    return True


def two_cuts(adj, n):
    """All vertex pairs (i < j) whose removal disconnects the graph."""
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            if not connected_without(adj, n, (1 << i) | (1 << j)):
                out.append((i, j))
    return out


def _find_pebble(root, other, peb, out):
    parent = {root: -1}
    visited = {root, other}
    stack = [root]
    while stack:
        x = stack.pop()
        for y in out[x]:
            if y in visited:
                continue
            visited.add(y)
            parent[y] = x
            if peb[y] > 0:
                z = y
                while z != root:
                    px = parent[z]
                    out[z].append(px)
                    out[px].remove(z)
                    z = px
                peb[y] -= 1
                peb[root] += 1
                return True
            stack.append(y)
    return False


def pebble_rank(n, eu, ev):
    """Number of edges accepted by the (2,3) pebble game, in input order."""
    peb = [2] * n
    out = [[] for _ in range(n)]
    accepted = 0
    for u, v in zip(eu, ev):
        u, v = int(u), int(v)
        ok = True
        while peb[u] + peb[v] < 4:
            if peb[u] < 2 and _find_pebble(u, v, peb, out):
                continue
            if peb[v] < 2 and _find_pebble(v, u, peb, out):
                continue
            ok = False
            break
        if ok:
            peb[u] -= 1
            out[u].append(v)
            accepted += 1
    return accepted


def max_subset_excess(n, eu, ev, proper_only):
    """max over vertex sets S (|S| >= 2) of edges(S) - (2|S| - 3)."""
    masks = [(1 << int(u)) | (1 << int(v)) for u, v in zip(eu, ev)]
    full = (1 << n) - 1
    best = -(1 << 30)
    for s in range(1, full + 1):
        if proper_only and s == full:
            continue
        size = bin(s).count("1")
        if size < 2:
            continue
        cnt = 0
        for m in masks:
            if m & s == m:
                cnt += 1
        best = max(best, cnt - (2 * size - 3))
    return best


def energy_terms(x, kind, a, delta, omega, kexp, coef, lam, minv):
    """Value, first and second derivative of every edge energy at x = squared length.

    kind 0 is the increasing (cable) shape, kind 1 the decreasing (strut) shape.
    """
    x = np.asarray(x, dtype=float)
    val = np.zeros_like(x)
    d1 = np.zeros_like(x)
    d2 = np.zeros_like(x)
    for e in range(len(x)):
        val[e], d1[e], d2[e] = _term(x[e], kind[e], a[e], delta[e], omega[e],
                                     kexp[e], coef[e], lam[e], minv)
    return val, d1, d2


def _term(x, kind, a, dl, w, k, c, lam, minv):
    if kind == 0:
        top_slope = max(2.0 / dl, 2.0 * w)
        r = (top_slope - w) / dl
        if x <= 0.0:
            return 0.0, 0.0, 0.0
        if x <= a:
            s = x / a
            sk = s ** k
            val = a * (w * sk * s / (k + 1.0) + c * (s * s / 2.0 - s * s * s / 3.0))
            d1 = w * sk + c * s * (1.0 - s)
            d2 = (w * k * s ** (k - 1.0) + c * (1.0 - 2.0 * s)) / a
            return val, d1, d2
        u = x - a
        if u <= dl:
            return minv + w * u + 0.5 * r * u * u, w + r * u, r
        top = minv + w * dl + 0.5 * r * dl * dl
        return top + top_slope * (u - dl), top_slope, 0.0
    top_slope = max(2.0 / dl, -2.0 * w)
    r = (w + top_slope) / dl
    u = x - a
    if u >= 0.0:
        ex = np.exp(-lam * u)
        return minv * ex, w * ex, -lam * w * ex
    if u >= -dl:
        return minv + w * u + 0.5 * r * u * u, w + r * u, r
    bottom = minv - w * dl + 0.5 * r * dl * dl
    return bottom - top_slope * (u + dl), -top_slope, 0.0


def energy_eval(x, eu, ev, kind, a, delta, omega, kexp, coef, lam, minv, order):
    """Total energy at flattened coordinates x, with gradient (order >= 1) and Hessian (order 2)."""
    x = np.asarray(x, dtype=float)
    n2 = x.shape[0]
    grad = np.zeros(n2) if order >= 1 else None
    hess = np.zeros((n2, n2)) if order >= 2 else None
    total = 0.0
    for e in range(len(eu)):
        i, j = int(eu[e]), int(ev[e])
        dx = x[2 * i] - x[2 * j]
        dy = x[2 * i + 1] - x[2 * j + 1]
        val, d1, d2 = _term(dx * dx + dy * dy, kind[e], a[e], delta[e], omega[e],
                            kexp[e], coef[e], lam[e], minv)
        total += val
        if order >= 1:
            gx, gy = 2.0 * d1 * dx, 2.0 * d1 * dy
            grad[2 * i] += gx
            grad[2 * i + 1] += gy
            grad[2 * j] -= gx
            grad[2 * j + 1] -= gy
        if order >= 2:
            bxx = 2.0 * d1 + 4.0 * d2 * dx * dx
            byy = 2.0 * d1 + 4.0 * d2 * dy * dy
            bxy = 4.0 * d2 * dx * dy
            for (r, s, sg) in ((i, i, 1.0), (j, j, 1.0), (i, j, -1.0), (j, i, -1.0)):
                hess[2 * r, 2 * s] += sg * bxx
                hess[2 * r + 1, 2 * s + 1] += sg * byy
                hess[2 * r, 2 * s + 1] += sg * bxy
                hess[2 * r + 1, 2 * s] += sg * bxy
    return total, grad, hess
