"""Command-line interface: ``graph-poincare {gen,tree,john,verify,sharp}``."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import generators
from .graph_core import GraphError
from .graphio import dumps, load_graph, save_graph
from .reports import ReportSink, write_csv
from .suites import DEFAULT_PS, DEFAULT_QS, corpus_cases, fixed_cases, run_suite, sharp_report
from .tree import build_spanning_tree, optimize_tree, random_spanning_tree, shadow_summary, subtree_sums

SEED_ENV = "GRAPH_POINCARE_SEED"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"error: {SEED_ENV} must be an integer, got {raw!r}")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_graph(args, g, tree) -> None:
    if args.output in (None, "-"):
        sys.stdout.write(dumps(g, tree))
    else:
        save_graph(args.output, g, tree)


def cmd_gen(args) -> int:
    if args.family == "kary":
        g, tree = generators.kary_tree(args.k, args.depth, args.alpha)
    elif args.family == "logpath":
        g, tree = generators.log_path(args.N, args.gamma)
    elif args.family == "random":
        g = generators.random_connected(args.n, args.edge_prob, args.law, seed=args.seed)
        tree = None
    else:
        g = generators.grid(args.nx, args.ny, args.mu)
        tree = None
    _write_graph(args, g, tree)
    return 0


def cmd_tree(args) -> int:
    g, _ = load_graph(args.graph)
    if args.optimize:
        tree, _ = optimize_tree(g, budget=args.budget, seed=args.seed, mode=args.optimize)
    elif args.strategy == "random":
        tree = random_spanning_tree(g, args.root, seed=args.seed)
    else:
        tree = build_spanning_tree(g, args.root or 0, args.strategy)
    if args.output is None:
        args.output = args.graph
    _write_graph(args, g, tree)
    return 0


def _truncation_trend(g, tree):
    """Max shadow ratio of the tree cut at depths 1, 2, 4, ..., height."""
    out = []
    d = 1
    while True:
        d = min(d, tree.height)
        keep = tree.depth <= d
        sm = subtree_sums(tree, np.where(keep, g.weights, 0.0))
        out.append((d, float(np.max(sm[keep] / g.weights[keep]))))
        if d >= tree.height:
            return out
        d *= 2


def cmd_john(args) -> int:
    g, tree = load_graph(args.graph)
    source = "file"
    if tree is None:
        tree, source = build_spanning_tree(g, 0), "bfs-root-0"
    s = shadow_summary(g, tree)
    label = (lambda v: g.labels[v]) if g.labels is not None else str
    lines = [
        ("vertices", g.n),
        ("edges", g.edge_count),
        ("tree_source", source),
        ("root", tree.root),
        ("root_label", label(tree.root)),
        ("total_measure", _fmt(g.total_measure)),
        ("john_constant", _fmt(s.john_constant)),
        ("argmax_vertex", s.argmax),
        ("argmax_label", label(s.argmax)),
        ("degree_bound", s.degree_bound),
        ("finite_graph_bound", _fmt(g.total_measure / float(np.min(g.weights)))),
    ]
    for k, v in lines:
        print(f"{k} = {v}")
    if tree.height >= 1:
        trend = _truncation_trend(g, tree)
        print("depth_trend = " + ", ".join(f"{d}:{_fmt(c)}" for d, c in trend))
        growing = all(b[1] > a[1] for a, b in zip(trend, trend[1:]))
        if s.john_constant > args.warn_threshold and growing and len(trend) > 2:
            print(
                f"warning: john constant {s.john_constant:.6g} exceeds {args.warn_threshold:g} and grows "
                "at every truncation depth; the family looks not uniformly John"
            )
    return 0


def cmd_verify(args) -> int:
    if args.graph:
        g, tree = load_graph(args.graph)
        if tree is None:
            tree = build_spanning_tree(g, 0)
        cases = fixed_cases(g, tree)
    else:
        cases = corpus_cases(min(args.trials, args.corpus_size), args.seed, max_n=args.max_n)
    kw = {}
    if args.suite in ("hardy", "decomp"):
        kw["qs"] = args.q or DEFAULT_QS
    elif args.suite == "poincare":
        kw["ps"] = args.p or DEFAULT_PS
    elif args.p:
        kw["ps"] = args.p
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        sink = ReportSink(out)
        rows = []
        for rep, log in run_suite(args.suite, cases, args.trials, args.seed, timing=args.timing, **kw):
            sink.emit(rep)
            pkey = ";".join(f"{k}={v}" for k, v in sorted(log.params.items()))
            rows.extend((log.name, pkey, *r) for r in log.rows)
    finally:
        if out is not sys.stdout:
            out.close()
    if args.csv:
        write_csv(args.csv, ["check_name", "parameters", "trial", "n", "measured", "theoretical", "passed"], rows)
    return 0 if sink.all_passed else 1


def cmd_sharp(args) -> int:
    g, tree = load_graph(args.graph)
    if tree is None:
        tree = build_spanning_tree(g, 0)
    sink = ReportSink(sys.stdout)
    for p in args.p or [2.0]:
        rep, witness = sharp_report(g, tree, p, args.restarts, args.iters, args.seed, args.mode, args.timing)
        sink.emit(rep)
        if args.witness:
            path = Path(args.witness)
            if len(args.p or [2.0]) > 1:
                path = path.with_name(f"{path.stem}_p{p:g}{path.suffix}")
            write_csv(path, ["vertex", "value"], enumerate(witness.tolist()))
    return 0 if sink.all_passed else 1


def build_parser() -> argparse.ArgumentParser:
    seed = _default_seed()
    ap = argparse.ArgumentParser(
        prog="graph-poincare",
        description="John constants, Hardy-type operators and Poincare inequalities on weighted graphs.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a graph document")
    gsub = gen.add_subparsers(dest="family", required=True)
    k = gsub.add_parser("kary", help="weighted complete k-ary tree")
    k.add_argument("--k", type=int, required=True)
    k.add_argument("--depth", type=int, required=True)
    k.add_argument("--alpha", type=float, required=True)
    lp = gsub.add_parser("logpath", help="path on 2..N with mu(n) = 1/(n ln(n)^gamma)")
    lp.add_argument("--N", type=int, required=True)
    lp.add_argument("--gamma", type=float, default=2.0)
    rnd = gsub.add_parser("random", help="seeded random connected graph")
    rnd.add_argument("--n", type=int, required=True)
    rnd.add_argument("--edge-prob", type=float, default=0.05)
    rnd.add_argument("--law", choices=generators.WEIGHT_LAWS, default="uniform")
    rnd.add_argument("--seed", type=int, default=seed)
    gr = gsub.add_parser("grid", help="nx by ny lattice")
    gr.add_argument("--nx", type=int, required=True)
    gr.add_argument("--ny", type=int, required=True)
    gr.add_argument("--mu", type=float, default=1.0)
    for p in (k, lp, rnd, gr):
        p.add_argument("-o", "--output", help="output file (default: stdout)")
        p.set_defaults(func=cmd_gen)

    tr = sub.add_parser("tree", help="build or optimize a rooted spanning tree and store it in the document")
    tr.add_argument("graph")
    tr.add_argument("--root", type=int, default=None)
    tr.add_argument("--strategy", choices=("bfs", "dfs", "random"), default="bfs")
    tr.add_argument("--optimize", choices=("exhaustive", "greedy"))
    tr.add_argument("--budget", type=int, default=10_000)
    tr.add_argument("--seed", type=int, default=seed)
    tr.add_argument("-o", "--output", help="output file (default: overwrite the input; '-' for stdout)")
    tr.set_defaults(func=cmd_tree)

    jo = sub.add_parser("john", help="print the shadow summary of the document's tree")
    jo.add_argument("graph")
    jo.add_argument("--warn-threshold", type=float, default=10.0)
    jo.set_defaults(func=cmd_john)

    ve = sub.add_parser("verify", help="run a randomized verification suite and emit JSON-lines reports")
    ve.add_argument("suite", choices=("hardy", "decomp", "poincare", "local"))
    ve.add_argument("graph", nargs="?", help="graph document (default: a seeded random corpus)")
    ve.add_argument("--p", type=float, nargs="+")
    ve.add_argument("--q", type=float, nargs="+")
    ve.add_argument("--trials", type=int, default=100)
    ve.add_argument("--seed", type=int, default=seed)
    ve.add_argument("--corpus-size", type=int, default=50)
    ve.add_argument("--max-n", type=int, default=200)
    ve.add_argument("--out", help="report file (default: stdout)")
    ve.add_argument("--csv", help="write per-trial rows to this CSV file")
    ve.add_argument("--timing", action="store_true", help="fill runtime_ms (output then varies run to run)")
    ve.set_defaults(func=cmd_verify)

    sh = sub.add_parser("sharp", help="estimate the best Poincare constant by projected subgradient ascent")
    sh.add_argument("graph")
    sh.add_argument("--p", type=float, nargs="+")
    sh.add_argument("--restarts", type=int, default=8)
    sh.add_argument("--iters", type=int, default=500)
    sh.add_argument("--seed", type=int, default=seed)
    sh.add_argument("--mode", choices=("full", "tree"), default="full")
    sh.add_argument("--witness", help="write the maximizing function to this CSV file")
    sh.add_argument("--timing", action="store_true")
    sh.set_defaults(func=cmd_sharp)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        # downstream reader closed early (e.g. piped into head)
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 2
    except (GraphError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
