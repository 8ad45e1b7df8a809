"""Time the compiled kernels against the pure Python fallback.

    python3 benchmarks/bench_kernels.py [--graphs 300] [--repeat 3]

Each row runs the same workload under both backends, checks that the results
agree, and prints the best-of-repeat wall time and the speedup.
"""
import argparse
import time

import numpy as np

from bracedpoly import census, construct, kernels
from bracedpoly.combin import is_3_connected


def _graphs(n, count, seed):
    graphs = [g for g in census.enumerate_graphs(n, three_connected=False)]
    rng = np.random.default_rng(seed)
    pick = rng.choice(len(graphs), size=min(count, len(graphs)), replace=False)
    return [graphs[i] for i in sorted(pick)]


def _energy_state(graph):
    fw = construct.sample_strictly_convex(graph, seed=1)[0]
    edges = graph.edge_array
    m = len(edges)
    terms = [construct.energy_term(1.0, m, 0.05, 0.3 if k < graph.n else -0.3) for k in range(m)]
    en = construct._Energy(edges, terms)
    return en, fw.points.reshape(-1)


def workloads(graphs, circuits):
    adj = [(g.adjacency, g.n) for g in graphs]
    eds = [(g.n, g.edge_array[:, 0].tolist(), g.edge_array[:, 1].tolist()) for g in circuits]
    energy = [_energy_state(g) for g in circuits[:50]]
    realize = [g for g in graphs if is_3_connected(g)][:20]

    return {
        "3-connectivity (cut)": lambda: [kernels.is_k_connected_cut(a, n, 3) for a, n in adj],
        "2-vertex cuts": lambda: [kernels.two_cuts(a, n) for a, n in adj],
        "pebble game rank": lambda: [kernels.pebble_rank(n, u, v) for n, u, v in eds],
        "subset excess": lambda: [kernels.max_subset_excess(n, u, v, True) for n, u, v in eds[:100]],
        "energy + hessian": lambda: [float(en(x, 2)[0]) for en, x in energy * 20],
        "realize (end to end)": lambda: [float(construct.realize_properly_stressed(g).stress.sum())
                                         for g in realize],
    }


def best_time(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--graphs", type=int, default=300)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if "compiled" not in kernels.available_backends():
        raise SystemExit("compiled kernels are not built; run pip install -e . --no-build-isolation")
    graphs = _graphs(args.n, args.graphs, args.seed)
    circuits = census.enumerate_circuits(args.n)
    jobs = workloads(graphs, circuits)

    print(f"{'kernel':24s} {'compiled s':>11s} {'python s':>11s} {'speedup':>8s}  agree")
    for name, fn in jobs.items():
        kernels.set_backend("compiled")
        tc, rc = best_time(fn, args.repeat)
        kernels.set_backend("python")
        tp, rp = best_time(fn, args.repeat)
        kernels.set_backend("compiled")
        agree = np.allclose(np.asarray(rc, dtype=object).astype(float), np.asarray(rp, dtype=object).astype(float),
                            rtol=1e-9, atol=1e-12) if name.startswith(("energy", "realize")) else rc == rp
        print(f"{name:24s} {tc:11.4f} {tp:11.4f} {tp / tc:8.1f}  {agree}")


if __name__ == "__main__":
    main()
