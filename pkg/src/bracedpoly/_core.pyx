# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: cut enumeration, (2,3) pebble game, subgraph
counting and the composite edge energy used by the realisation solver.

Mirrors ``_core_py`` function for function.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, pow
from libc.stdlib cimport malloc, free

ctypedef unsigned long long u64

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil
    int __builtin_popcountll(unsigned long long) nogil

cdef enum:
    MAXN = 62


cdef bint _connected(const u64* adj, int n, u64 removed) nogil:
    cdef u64 full = ((<u64>1 << n) - 1) & ~removed
    cdef u64 seen, frontier, nxt, f
    if full == 0:
        return True
    seen = full & (~full + 1)
    frontier = seen
    while frontier:
        nxt = 0
        f = frontier
        while f:
            nxt |= adj[__builtin_ctzll(f)]
            f &= f - 1
        nxt &= full & ~seen
        seen |= nxt
        frontier = nxt
    return seen == full


cdef int _load_adj(adj, int n, u64* out) except -1:
    cdef int i
    if n > MAXN:
        raise ValueError("compiled kernels support at most 62 vertices")
    for i in range(n):
        out[i] = <u64>adj[i]
    return 0


def connected_without(adj, int n, removed):
    cdef u64 a[MAXN]
    _load_adj(adj, n, a)
    return bool(_connected(a, n, <u64>removed))


cdef bint _cuts_ok(const u64* adj, int n, int size, int start, u64 removed) nogil:
    cdef int v
    if size == 0:
        return _connected(adj, n, removed)
    for v in range(start, n):
        if not _cuts_ok(adj, n, size - 1, v + 1, removed | (<u64>1 << v)):
            return False
    return True


def is_k_connected_cut(adj, int n, int k):
    cdef u64 a[MAXN]
    cdef int size
    _load_adj(adj, n, a)
    for size in range(k):
        if not _cuts_ok(a, n, size, 0, 0):
            return False
    return True


def two_cuts(adj, int n):
    cdef u64 a[MAXN]
    cdef int i, j
    _load_adj(adj, n, a)
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            if not _connected(a, n, (<u64>1 << i) | (<u64>1 << j)):
                out.append((i, j))
    return out


cdef bint _find_pebble(int root, int other, int n, int* peb, int* outdeg,
                       int* out, int* visited, int* parent, int* stack) nogil:
    cdef int top = 0, x, y, t, z, px, q
    for x in range(n):
        visited[x] = 0
    visited[root] = 1
    visited[other] = 1
    stack[top] = root
    top += 1
    while top > 0:
        top -= 1
        x = stack[top]
        for t in range(outdeg[x]):
            y = out[2 * x + t]
            if visited[y]:
                continue
            visited[y] = 1
            parent[y] = x
            if peb[y] > 0:
                z = y
                while z != root:
                    px = parent[z]
                    out[2 * z + outdeg[z]] = px
                    outdeg[z] += 1
                    for q in range(outdeg[px]):
                        if out[2 * px + q] == z:
                            out[2 * px + q] = out[2 * px + outdeg[px] - 1]
                            break
                    outdeg[px] -= 1
                    z = px
                peb[y] -= 1
                peb[root] += 1
                return True
            stack[top] = y
            top += 1
    return False


def pebble_rank(int n, eu, ev):
    cdef int m = len(eu)
    cdef int* buf = <int*>malloc(sizeof(int) * 7 * (n + 1))
    cdef int *peb, *outdeg, *out, *visited, *parent, *stack
    cdef int e, u, v, accepted = 0
    cdef bint ok
    if buf == NULL:
        raise MemoryError()
    peb = buf
    outdeg = buf + n
    out = buf + 2 * n
    visited = buf + 4 * n
    parent = buf + 5 * n
    stack = buf + 6 * n
    try:
        for u in range(n):
            peb[u] = 2
            outdeg[u] = 0
        for e in range(m):
            u = eu[e]
            v = ev[e]
            ok = True
            while peb[u] + peb[v] < 4:
                if peb[u] < 2 and _find_pebble(u, v, n, peb, outdeg, out, visited, parent, stack):
                    continue
                if peb[v] < 2 and _find_pebble(v, u, n, peb, outdeg, out, visited, parent, stack):
                    continue
                ok = False
                break
            if ok:
                peb[u] -= 1
                out[2 * u + outdeg[u]] = v
                outdeg[u] += 1
                accepted += 1
    finally:
        free(buf)
    return accepted


def max_subset_excess(int n, eu, ev, bint proper_only):
    cdef int m = len(eu)
    cdef u64 masks[512]
    cdef u64 s, full
    cdef int e, size, cnt, best = -(1 << 30)
    if m > 512 or n > 30:
        raise ValueError("subset enumeration is limited to small graphs")
    for e in range(m):
        masks[e] = (<u64>1 << <int>eu[e]) | (<u64>1 << <int>ev[e])
    full = (<u64>1 << n) - 1
    s = 1
    while s <= full:
        if not (proper_only and s == full):
            size = __builtin_popcountll(s)
            if size >= 2:
                cnt = 0
                for e in range(m):
                    if masks[e] & s == masks[e]:
                        cnt += 1
                if cnt - (2 * size - 3) > best:
                    best = cnt - (2 * size - 3)
        s += 1
    return best


cdef inline void _term(double x, int kind, double a, double dl, double w, double k,
                       double c, double lam, double minv,
                       double* val, double* d1, double* d2) nogil:
    cdef double r, s, sk, u, top, bottom, ex, slope
    if kind == 0:
        slope = 2.0 / dl if 2.0 / dl > 2.0 * w else 2.0 * w
        r = (slope - w) / dl
        if x <= 0.0:
            val[0] = 0.0
            d1[0] = 0.0
            d2[0] = 0.0
            return
        if x <= a:
            s = x / a
            sk = pow(s, k)
            val[0] = a * (w * sk * s / (k + 1.0) + c * (s * s / 2.0 - s * s * s / 3.0))
            d1[0] = w * sk + c * s * (1.0 - s)
            d2[0] = (w * k * pow(s, k - 1.0) + c * (1.0 - 2.0 * s)) / a
            return
        u = x - a
        if u <= dl:
            val[0] = minv + w * u + 0.5 * r * u * u
            d1[0] = w + r * u
            d2[0] = r
            return
        top = minv + w * dl + 0.5 * r * dl * dl
        val[0] = top + slope * (u - dl)
        d1[0] = slope
        d2[0] = 0.0
        return
    slope = 2.0 / dl if 2.0 / dl > -2.0 * w else -2.0 * w
    r = (w + slope) / dl
    u = x - a
    if u >= 0.0:
        ex = exp(-lam * u)
        val[0] = minv * ex
        d1[0] = w * ex
        d2[0] = -lam * w * ex
        return
    if u >= -dl:
        val[0] = minv + w * u + 0.5 * r * u * u
        d1[0] = w + r * u
        d2[0] = r
        return
    bottom = minv - w * dl + 0.5 * r * dl * dl
    val[0] = bottom - slope * (u + dl)
    d1[0] = -slope
    d2[0] = 0.0


def energy_terms(x, kind, a, delta, omega, kexp, coef, lam, double minv):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const int[::1] kv = np.ascontiguousarray(kind, dtype=np.intc)
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] dv = np.ascontiguousarray(delta, dtype=np.float64)
    cdef const double[::1] wv = np.ascontiguousarray(omega, dtype=np.float64)
    cdef const double[::1] ke = np.ascontiguousarray(kexp, dtype=np.float64)
    cdef const double[::1] cv = np.ascontiguousarray(coef, dtype=np.float64)
    cdef const double[::1] lv = np.ascontiguousarray(lam, dtype=np.float64)
    cdef Py_ssize_t m = xv.shape[0], e
    val = np.zeros(m)
    g1 = np.zeros(m)
    g2 = np.zeros(m)
    cdef double[::1] vv = val, v1 = g1, v2 = g2
    for e in range(m):
        _term(xv[e], kv[e], av[e], dv[e], wv[e], ke[e], cv[e], lv[e], minv,
              &vv[e], &v1[e], &v2[e])
    return val, g1, g2


def energy_eval(x, eu, ev, kind, a, delta, omega, kexp, coef, lam, double minv, int order):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const Py_ssize_t[::1] uv = np.ascontiguousarray(eu, dtype=np.intp)
    cdef const Py_ssize_t[::1] vv = np.ascontiguousarray(ev, dtype=np.intp)
    cdef const int[::1] kv = np.ascontiguousarray(kind, dtype=np.intc)
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] dv = np.ascontiguousarray(delta, dtype=np.float64)
    cdef const double[::1] wv = np.ascontiguousarray(omega, dtype=np.float64)
    cdef const double[::1] ke = np.ascontiguousarray(kexp, dtype=np.float64)
    cdef const double[::1] cv = np.ascontiguousarray(coef, dtype=np.float64)
    cdef const double[::1] lv = np.ascontiguousarray(lam, dtype=np.float64)
    cdef Py_ssize_t n2 = xv.shape[0], m = uv.shape[0], e, i, j
    cdef double total = 0.0, val, d1, d2, dx, dy, gx, gy, bxx, byy, bxy
    grad = np.zeros(n2) if order >= 1 else None
    hess = np.zeros((n2, n2)) if order >= 2 else None
    cdef double[::1] gv
    cdef double[:, ::1] hv
    if order >= 1:
        gv = grad
    if order >= 2:
        hv = hess
    for e in range(m):
        i = uv[e]
        j = vv[e]
        dx = xv[2 * i] - xv[2 * j]
        dy = xv[2 * i + 1] - xv[2 * j + 1]
        _term(dx * dx + dy * dy, kv[e], av[e], dv[e], wv[e], ke[e], cv[e], lv[e], minv,
              &val, &d1, &d2)
        total += val
        if order >= 1:
            gx = 2.0 * d1 * dx
            gy = 2.0 * d1 * dy
            gv[2 * i] += gx
            gv[2 * i + 1] += gy
            gv[2 * j] -= gx
            gv[2 * j + 1] -= gy
        if order >= 2:
            bxx = 2.0 * d1 + 4.0 * d2 * dx * dx
            byy = 2.0 * d1 + 4.0 * d2 * dy * dy
            bxy = 4.0 * d2 * dx * dy
            _block(hv, i, i, bxx, byy, bxy)
            _block(hv, j, j, bxx, byy, bxy)
            _block(hv, i, j, -bxx, -byy, -bxy)
            _block(hv, j, i, -bxx, -byy, -bxy)
    return total, grad, hess


cdef inline void _block(double[:, ::1] h, Py_ssize_t r, Py_ssize_t s,
                        double bxx, double byy, double bxy) nogil:
    h[2 * r, 2 * s] += bxx
    h[2 * r + 1, 2 * s + 1] += byy
    h[2 * r, 2 * s + 1] += bxy
    h[2 * r + 1, 2 * s] += bxy
