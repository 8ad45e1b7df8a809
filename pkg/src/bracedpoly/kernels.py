"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the pure Python
module takes over with identical results.  ``set_backend`` switches at
runtime (used by the tests and the benchmark).
"""
import warnings

from . import _core_py

try:
    from . import _core as _compiled
except ImportError:  # extension not built
    _compiled = None
    warnings.warn("compiled kernels not available, using the pure Python fallback",
                  RuntimeWarning, stacklevel=2)

_impl = _compiled if _compiled is not None else _core_py


def available_backends():
    return ["compiled", "python"] if _compiled is not None else ["python"]


def backend() -> str:
    return "compiled" if _impl is _compiled else "python"


def set_backend(name: str) -> None:
    global _impl
    if name == "python":
        _impl = _core_py
    elif name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        _impl = _compiled
    else:
        raise ValueError(f"unknown backend {name!r}")


def connected_without(adj, n, removed):
    return _impl.connected_without(adj, n, removed)


def is_k_connected_cut(adj, n, k):
    return _impl.is_k_connected_cut(adj, n, k)


def two_cuts(adj, n):
    return _impl.two_cuts(adj, n)


def pebble_rank(n, eu, ev):
    return _impl.pebble_rank(n, eu, ev)


def max_subset_excess(n, eu, ev, proper_only):
    return _impl.max_subset_excess(n, eu, ev, proper_only)


def energy_terms(x, kind, a, delta, omega, kexp, coef, lam, minv):
    return _impl.energy_terms(x, kind, a, delta, omega, kexp, coef, lam, minv)


def energy_eval(x, eu, ev, kind, a, delta, omega, kexp, coef, lam, minv, order):
    return _impl.energy_eval(x, eu, ev, kind, a, delta, omega, kexp, coef, lam, minv, order)
