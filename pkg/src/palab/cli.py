"""Command-line front end.

Exit codes: 0 success (and verify pass), 1 runtime/verification failure,
2 usage or argument errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, experiments, growth, metrics, theory
from . import structure as structure_mod
from .graph import PAGraph, export_degree_histogram
from .params import make_params


def _add_params_args(p):
    p.add_argument("--model", choices=("a", "b", "c"), required=True)
    p.add_argument("-m", "--m", type=int, default=1, help="edges per new vertex")
    p.add_argument("--delta", default="0",
                   help="attachment shift; rational or decimal text, e.g. -1, 0.5, 1/3")


def cmd_generate(args) -> int:
    params = make_params(args.model, args.m, args.delta)
    g = growth.generate(params, args.t, args.seed, max_edges=args.max_edges)
    g.save(args.out)
    print(json.dumps({"path": args.out, "model": params.variant, "m": params.m,
                      "delta": str(params.delta), "t": g.t, "edges": g.n_edges,
                      "seed": args.seed}))
    return 0


def cmd_stats(args) -> int:
    g = PAGraph.load(args.graph)
    p = g.params
    out = {"model": p.variant, "m": p.m, "delta": str(p.delta), "t": g.t,
           "seed": g.seed, "edges": g.n_edges, "tau": p.tau,
           "max_degree": int(g.degrees.max()),
           "degree_sum": int(g.degrees.sum())}
    if p.variant == "a":
        count, _ = metrics.components(g)
        out["components"] = count
    out["core_sigma"] = args.sigma
    out["core_size"] = structure_mod.core(g, args.sigma).size
    if p.tau < 3:
        u1v = theory.u1(p, g.t)
        out["u1"] = u1v
        out["n_geq_u1"] = metrics.n_geq(g, u1v)
    if args.hist:
        export_degree_histogram(g, args.hist)
        out["histogram_csv"] = args.hist
    if args.plot:
        from . import plotting
        plotting.degree_histogram_figure(g, args.plot)
        out["histogram_png"] = args.plot
    print(json.dumps(out))
    return 0


def cmd_distance(args) -> int:
    g = PAGraph.load(args.graph)
    rep = metrics.bfs(g, args.source)
    reached = rep.dist[rep.dist >= 0]
    out = {"source": args.source, "eccentricity": rep.eccentricity,
           "n_reached": rep.n_reached,
           "level_counts": np.bincount(reached).tolist()}
    if args.target is not None:
        out["target"] = args.target
        out["distance"] = rep.distance(args.target)
    print(json.dumps(out))
    return 0


def cmd_diameter(args) -> int:
    g = PAGraph.load(args.graph)
    d = metrics.diameter(g, method=args.method, force=args.force)
    print(json.dumps({"lower": d.lower, "upper": d.upper, "exact": d.exact,
                      "method": d.method, "witness": list(d.witness)}))
    return 0


def cmd_structure(args) -> int:
    g = PAGraph.load(args.graph)
    summary = structure_mod.export_structure_summary(g, args.sigma, args.summary,
                                                     D=args.layer_d, k=args.depth)
    if args.trees:
        n = structure_mod.export_tree_report(g, args.depth, args.trees)
        summary["trees_csv"] = args.trees
        summary["trees_rows"] = n
    print(json.dumps(summary))
    return 0


def cmd_theory(args) -> int:
    params = make_params(args.model, args.m, args.delta)
    out = theory.constants(params, t=args.t, sigma=args.sigma, C=args.C)
    print(json.dumps(out))
    return 0


def cmd_verify(args) -> int:
    rep = experiments.verify(args.suite)
    print(json.dumps(rep))
    return 0 if rep["passed"] else 1


def cmd_sweep(args) -> int:
    cfg = experiments.load_config(args.config)
    outdir = experiments.run(cfg)
    print(json.dumps({"outdir": str(outdir), "config_hash": cfg.config_hash}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="palab",
                                 description="Affine preferential-attachment graphs: "
                                             "generation, metrics, structure, theory checks.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("generate", help="grow a graph and save its event log")
    _add_params_args(p)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-edges", type=int, default=growth.DEFAULT_MAX_EDGES)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("stats", help="summary statistics of a saved graph")
    p.add_argument("graph")
    p.add_argument("--sigma", type=float, default=2.5)
    p.add_argument("--hist", help="write degree histogram CSV here")
    p.add_argument("--plot", help="render degree histogram PNG here")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("distance", help="BFS distances from a source vertex")
    p.add_argument("graph")
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--target", type=int)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("diameter", help="exact diameter or a two-sided bracket")
    p.add_argument("graph")
    p.add_argument("--method", choices=("auto", "exact", "bounds"), default="auto")
    p.add_argument("--force", action="store_true",
                   help="allow exact all-sources BFS past the size guard")
    p.set_defaults(func=cmd_diameter)

    p = sub.add_parser("structure", help="core/layers/proper-tree report")
    p.add_argument("graph")
    p.add_argument("--sigma", type=float, default=2.5)
    p.add_argument("--layer-d", type=float, default=1.0)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--summary", required=True, help="summary JSON path")
    p.add_argument("--trees", help="per-root exploration-tree CSV path")
    p.set_defaults(func=cmd_structure)

    p = sub.add_parser("theory", help="closed-form constants as JSON")
    _add_params_args(p)
    p.add_argument("--t", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--C", type=float)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("suite", choices=experiments.VERIFY_SUITES)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="run a config-driven experiment sweep")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
