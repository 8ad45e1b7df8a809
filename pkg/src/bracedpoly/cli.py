"""Command-line front end: ``bracedpoly <subcommand> ...``.

Exit codes: 0 on success, 1 when an input violates a precondition, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import census, combin, construct, linalg
from .errors import DomainError
from .model import TOL_GEOM, BracedPolygonGraph, Framework, framework_to_dict, from_json, graph_to_dict, is_strictly_convex
from .svg import render_svg


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- helpers

def _dump(obj, args):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    _emit(text, getattr(args, "out", None))


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}") from None
    return text


def _load(path):
    return from_json(_read(path))


def _load_framework(path) -> Framework:
    obj = _load(path)
    if not isinstance(obj, Framework):
        raise DomainError(f"{path} holds a graph; this command needs 'coords'")
    return obj


def _load_graph(path) -> BracedPolygonGraph:
    obj = _load(path)
    return obj.graph if isinstance(obj, Framework) else obj


def _file_stress(path, m):
    d = json.loads(_read(path))
    w = d.get("stress") if isinstance(d, dict) else None
    if w is None:
        return None
    if not isinstance(w, list) or len(w) != m:
        raise DomainError(f"'stress' must list {m} values in edge order")
    return np.asarray(w, dtype=float)


def _fw_dict(fw, stress=None):
    d = framework_to_dict(fw)
    if stress is not None:
        d["stress"] = [float(x) for x in stress]
    return d


def _labels(pairs):
    return [[a + 1, b + 1] for a, b in pairs]


# ---------------------------------------------------------------- analyze

def cmd_analyze(args):
    fw = _load_framework(args.file)
    rep = linalg.rigidity_report(fw, args.tol_rank)
    sig = linalg.stress_signature(fw, args.tol_rank, args.tol_psd)
    out = {"rigidity": rep.as_dict(), "stress": sig.as_dict(),
           "strictly_convex": is_strictly_convex(fw.points, args.tol_geom)}
    if sig.dim == 1:
        out["proper"] = linalg.is_proper_stress(fw.graph, sig.stress)
        ss = linalg.is_super_stable(fw, sig.stress, tol_psd=args.tol_psd, tol_rank=args.tol_rank)
        out["super_stable"] = ss.holds
        out["super_stable_reason"] = ss.reason
    _dump(out, args)


# ---------------------------------------------------------------- check

def _verdict(v):
    d = {"holds": v.holds, "reason": v.reason}
    if v.witness:
        w = v.witness
        d["witness"] = [x + 1 for x in w] if isinstance(w[0], int) else _labels(w)
    return d


def cmd_check(args):
    g = _load_graph(args.file)
    wanted = [k for k in ("k_connected", "minimal", "circuit", "uip", "dual", "construction")
              if getattr(args, k) not in (None, False)]
    if not wanted:
        wanted = ["k_connected", "minimal", "circuit", "uip", "dual", "construction"]
    out = {"graph": graph_to_dict(g)}
    if "k_connected" in wanted:
        k = args.k_connected or 3
        out["k_connected"] = {"k": k, "holds": combin.is_k_connected(g, k)}
    if "minimal" in wanted:
        out["minimal"] = _verdict(combin.minimality_report(g))
    if "circuit" in wanted:
        out["circuit"] = combin.is_generic_rigidity_circuit(g)
    if "uip" in wanted:
        out["uip"] = _verdict(combin.unique_interval_property(g))
    if "dual" in wanted:
        try:
            rep = combin.dual_invariant_suite(g)
            dual = combin.dual_polygon(g)
            out["dual"] = {"checks": rep.checks, "violations": rep.violations,
                           "dual_braces": _labels(dual.dual_braces[b] for b in g.braces)}
        except DomainError as exc:
            if args.dual:
                raise
            out["dual"] = {"skipped": str(exc)}
    if "construction" in wanted:
        try:
            seq = combin.construction_sequence(g)
            out["construction"] = {"base": [v + 1 for v in seq.base],
                                   "steps": [s.describe() for s in seq.steps]}
        except DomainError as exc:
            if args.construction:
                raise
            out["construction"] = {"skipped": str(exc)}
    _dump(out, args)


# ---------------------------------------------------------------- construct

def _nontrivial_flex(fw, tol_rank):
    for v in linalg.infinitesimal_flexes(fw, tol_rank):
        if not linalg.is_trivial_motion(fw.points, v):
            return v
    raise DomainError("framework has no nontrivial infinitesimal flex")


def _construct_push_pull(args):
    fw = _load_framework(args.files[0])
    v = _nontrivial_flex(fw, args.tol_rank)
    plus, minus = construct.push_pull_scaled(fw, v, args.scale, args.tol_geom)
    return [_fw_dict(plus), _fw_dict(minus)]


def _construct_average(args):
    if len(args.files) != 2:
        raise UsageError("average needs two framework files")
    f1, f2 = (_load_framework(f) for f in args.files)
    mid, flex, alpha = construct.aligned_average(f1, f2)
    d = _fw_dict(mid)
    d["rotation"] = alpha
    d["flex"] = [[float(x), float(y)] for x, y in flex]
    return d


def _sample_points(g, args):
    return construct.sample_strictly_convex(g, seed=args.seed, count=1)[0]


def _construct_superpose(args):
    g = _load_graph(args.files[0])
    plan = census.find_superposition(g)
    if plan is None:
        raise DomainError("no superposition plan with at most four parts")
    obj = _load(args.files[0])
    fw = obj if isinstance(obj, Framework) else _sample_points(g, args)
    cert = plan.certify(fw.points, tol_psd=args.tol_psd)
    idx = g.edge_index
    w = np.zeros(g.m)
    for e, x in cert.total.items():
        if e in idx:
            w[idx[e]] = x
    d = _fw_dict(fw, w / np.max(np.abs(w)))
    d["plan"] = plan.as_dict()["parts"]
    return d


def _construct_realize(args):
    g = _load_graph(args.files[0])
    pos = [(a - 1, b - 1) for a, b in args.positive or ()]
    r = construct.realize_properly_stressed(g, positive=pos, epsilon=args.epsilon, delta=args.delta,
                                            tol_geom=args.tol_geom, tol_psd=args.tol_psd)
    return _fw_dict(r.framework, r.stress)


def _construct_witness(args):
    g = _load_graph(args.files[0])
    w = construct.find_nonglobal_witness(g, budget=args.budget, seed=args.seed,
                                         tol_geom=args.tol_geom, tol_rank=args.tol_rank)
    if w is None:
        return {"witness": None, "note": "budget exhausted; inconclusive"}
    return {"witness": {"method": w.method, "strictly_convex_side": w.strictly_convex_side,
                        "base": _fw_dict(w.base), "plus": _fw_dict(w.plus), "minus": _fw_dict(w.minus)}}


def _construct_sample(args):
    obj = _load(args.files[0])
    g = obj.graph if isinstance(obj, Framework) else obj
    fws = construct.sample_strictly_convex(g, seed=args.seed, count=args.samples)
    return [_fw_dict(f) for f in fws]


_VERBS = {"push-pull": _construct_push_pull, "average": _construct_average,
          "superpose": _construct_superpose, "realize": _construct_realize,
          "witness": _construct_witness, "sample": _construct_sample}


def cmd_construct(args):
    _dump(_VERBS[args.verb](args), args)


# ---------------------------------------------------------------- enumerate / classify / report

def cmd_enumerate(args):
    if args.three_connected:
        graphs = census.enumerate_graphs(args.n)
    else:
        graphs = census.enumerate_circuits(args.n)
    text = "".join(json.dumps(graph_to_dict(g)) + "\n" for g in graphs)
    _emit(text, args.out)


def cmd_classify(args):
    if args.file is not None:
        rec = census.classify(_load_graph(args.file), seed=args.seed, sample_count=args.samples,
                              budget=args.budget, tol_rank=args.tol_rank, tol_psd=args.tol_psd)
        _dump(rec.as_dict(), args)
        return
    if args.n is None:
        raise UsageError("classify needs a graph file or --n")
    rep = census.census_report(args.n, out_dir=args.out or ".", seed=args.seed,
                               sample_count=args.samples, budget=args.budget,
                               tol_rank=args.tol_rank, tol_psd=args.tol_psd, workers=args.workers)
    sys.stdout.write(json.dumps({"path": rep.path, "counts": rep.counts}, sort_keys=True) + "\n")


def cmd_report(args):
    records = census.load_census(args.file)
    counts = {c: 0 for c in census.CLASSES}
    classes = {c: [] for c in census.CLASSES}
    for r in records:
        counts[r["class"]] += 1
        classes[r["class"]].append(r["braces"])
    _dump({"circuits": len(records), "counts": counts, "classes": classes}, args)


# ---------------------------------------------------------------- scan / render

def cmd_scan(args):
    phi = math.radians(args.phi)
    if args.rows:
        g = census.grunbaum_graph()
        out = {}
        for name, t in census.grunbaum_rows(phi).items():
            row = census.grunbaum_row(t, phi, tol_psd=args.tol_psd)
            out[name] = {"t": t, "strictly_convex": row.strictly_convex, "convex": row.convex,
                         "signature": [row.negative, row.zero, row.positive],
                         "brace_signs": {f"{a}{b}": s for (a, b), s in row.brace_signs(g).items()}}
        _dump(out, args)
        return
    rows = census.grunbaum_scan(args.t_min, args.t_max, args.steps, phi)
    _emit(census.scan_csv(rows), args.csv or args.out)


def cmd_render(args):
    fw = _load_framework(args.file)
    stress = _file_stress(args.file, fw.graph.m)
    if stress is None and not args.no_stress:
        sig = linalg.stress_signature(fw, args.tol_rank, args.tol_psd)
        stress = sig.stress
    red = ()
    if args.red:
        red = census.red_edge_analysis(fw.graph)
    _emit(render_svg(fw, stress, red), args.svg or args.out)


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--tol-rank", type=float, default=linalg.TOL_RANK)
    common.add_argument("--tol-psd", type=float, default=linalg.TOL_PSD)
    common.add_argument("--tol-geom", type=float, default=TOL_GEOM)
    common.add_argument("--out", help="output file (directory for classify --n)")

    p = argparse.ArgumentParser(prog="bracedpoly", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="rigidity and stress report for a framework")
    a.add_argument("file")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("check", parents=[common], help="combinatorial checks on a graph")
    c.add_argument("file")
    c.add_argument("--k-connected", type=int, metavar="K")
    c.add_argument("--minimal", action="store_true")
    c.add_argument("--circuit", action="store_true")
    c.add_argument("--uip", action="store_true")
    c.add_argument("--dual", action="store_true")
    c.add_argument("--construction", action="store_true")
    c.set_defaults(func=cmd_check)

    k = sub.add_parser("construct", parents=[common], help="build frameworks")
    k.add_argument("verb", choices=sorted(_VERBS))
    k.add_argument("files", nargs="+")
    k.add_argument("--samples", type=int, default=1)
    k.add_argument("--budget", type=int, default=4000)
    k.add_argument("--epsilon", type=float, default=1e-3)
    k.add_argument("--delta", type=float, default=0.05)
    k.add_argument("--scale", type=float, default=0.05, help="push-pull displacement over diameter")
    k.add_argument("--positive", type=int, nargs=2, action="append", metavar=("I", "J"),
                   help="brace to keep positive when realizing (repeatable)")
    k.set_defaults(func=cmd_construct)

    e = sub.add_parser("enumerate", parents=[common], help="list circuits up to dihedral symmetry")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--three-connected", action="store_true",
                   help="list every 3-connected graph with n-2 braces instead")
    e.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("classify", parents=[common], help="classify one graph or a whole census")
    s.add_argument("file", nargs="?")
    s.add_argument("--n", type=int)
    s.add_argument("--samples", type=int, default=50)
    s.add_argument("--budget", type=int, default=4000)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_classify)

    r = sub.add_parser("report", parents=[common], help="summarize a census file")
    r.add_argument("file")
    r.set_defaults(func=cmd_report)

    g = sub.add_parser("scan", parents=[common], help="stress scan of the four-fold symmetric octagon family")
    g.add_argument("--t-min", type=float, default=0.5)
    g.add_argument("--t-max", type=float, default=3.0)
    g.add_argument("--steps", type=int, default=51)
    g.add_argument("--phi", type=float, default=60.0, help="ray angle in degrees")
    g.add_argument("--rows", action="store_true", help="report the named threshold rows as JSON")
    g.add_argument("--csv")
    g.set_defaults(func=cmd_scan)

    v = sub.add_parser("render", parents=[common], help="draw a framework as SVG")
    v.add_argument("file")
    v.add_argument("--svg")
    v.add_argument("--red", action="store_true", help="colour the red braces")
    v.add_argument("--no-stress", action="store_true", help="draw every edge neutral")
    v.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except DomainError as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
