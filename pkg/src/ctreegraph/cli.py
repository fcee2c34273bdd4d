"""Command-line front end.

Every command prints a short human-readable summary, or with ``--json`` a
single object ``{command, params, results, timings}``.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import algorithms, stats
from .ctree import DEFAULT_B
from .errors import ContractViolation, ParseError
from .graph import from_edge_arrays
from .io import csr_to_edges, read_adjacency_arrays, read_updates, symmetrize, write_adjacency_arrays
from .rmat import rmat_generate, rmat_undirected
from .stream import run_stream


def _load(args):
    t0 = time.perf_counter()
    n, offsets, targets = read_adjacency_arrays(args.graph)
    src, dst = csr_to_edges(offsets, targets)
    if args.symmetrize:
        src, dst = symmetrize(src, dst)
    g = from_edge_arrays(n, src, dst, args.chunk_b)
    return g, (src, dst), time.perf_counter() - t0


def _bfs_summary(dist):
    reached = [d for d in dist if d >= 0]
    return {"reached": len(reached), "max_distance": max(reached) if reached else -1,
            "distance_sum": sum(reached)}


def cmd_bench_bfs(args):
    g, _, load = _load(args)
    rounds = []
    dist = None
    for _ in range(args.rounds):
        t0 = time.perf_counter()
        dist = algorithms.bfs(g, args.src, use_flat=not args.no_flat_snapshot,
                              direction_opt=not args.no_direction_opt)
        rounds.append(time.perf_counter() - t0)
    res = {"n": g.num_vertices, "m": g.num_edges, **_bfs_summary(dist)}
    return res, {"load": load, "rounds": rounds, "best": min(rounds)}


def cmd_bench_bc(args):
    g, _, load = _load(args)
    t0 = time.perf_counter()
    dep = algorithms.bc(g, args.src)
    dt = time.perf_counter() - t0
    top = max(range(len(dep)), key=dep.__getitem__) if dep else -1
    res = {"n": g.num_vertices, "m": g.num_edges, "dependency_sum": sum(dep),
           "max_dependency": dep[top] if dep else 0.0, "argmax": top}
    return res, {"load": load, "bc": dt}


def cmd_bench_mis(args):
    g, _, load = _load(args)
    t0 = time.perf_counter()
    flags = algorithms.mis(g, args.seed)
    dt = time.perf_counter() - t0
    return {"n": g.num_vertices, "m": g.num_edges, "mis_size": sum(flags)}, {"load": load, "mis": dt}


def cmd_two_hop(args):
    g, _, load = _load(args)
    t0 = time.perf_counter()
    out = sorted(algorithms.two_hop(g, args.src))
    dt = time.perf_counter() - t0
    return {"count": len(out), "vertices": out}, {"load": load, "two_hop": dt}


def _parse_rmat_spec(s):
    parts = s.split(",")
    if len(parts) != 5:
        raise ValueError(f"--rmat expects LOGN,M,A,B,C, got {s!r}")
    return int(parts[0]), int(parts[1]), float(parts[2]), float(parts[3]), float(parts[4])


def cmd_stream(args):
    g, edges, load = _load(args)
    if args.updates:
        signs, us, vs = read_updates(args.updates)
    else:
        log_n, m, a, b, c = _parse_rmat_spec(args.rmat)
        us, vs = rmat_undirected(log_n, m, a, b, c, args.seed)
        signs = np.ones(len(us), dtype=np.int64)
    if len(us) and args.query != "none" and (us.max() >= g.num_vertices):
        raise ContractViolation("updates name vertices outside the graph; queries need ids 0..n-1")
    out = run_stream(g, signs, us, vs, args.batch_size, args.query, args.query_threads, args.src,
                     check=not args.no_check, oracle_edges=edges)
    rep = out.report
    res = {k: v for k, v in rep.items() if not k.endswith("seconds") and not k.startswith("query_latency")
           and not k.startswith("query_seconds") and k not in ("update_throughput", "visibility_latency_per_edge",
                                                               "latency_ratio")}
    if args.query == "bfs":
        with out.vg.snapshot() as final:
            res["final_bfs"] = _bfs_summary(algorithms.bfs(final, args.src))
    timings = {k: v for k, v in rep.items() if k not in res}
    timings["load"] = load
    return res, timings


def cmd_stats(args):
    g, _, load = _load(args)
    t0 = time.perf_counter()
    rep = stats.memory_report(g)
    dt = time.perf_counter() - t0
    if not args.json:
        print(stats.format_report(rep))
    return rep, {"load": load, "stats": dt}


def cmd_rmat(args):
    t0 = time.perf_counter()
    if args.symmetrize:
        src, dst = rmat_undirected(args.log_n, args.m, args.a, args.b, args.c, args.seed)
    else:
        src, dst = rmat_generate(args.log_n, args.m, args.a, args.b, args.c, args.seed)
    n = 1 << args.log_n
    write_adjacency_arrays(args.out, n, src, dst)
    return {"n": n, "m": int(len(src)), "out": args.out}, {"generate_and_write": time.perf_counter() - t0}


def _graph_args(p):
    p.add_argument("--graph", required=True, help="AdjacencyGraph file")
    p.add_argument("--b", dest="chunk_b", type=int, default=DEFAULT_B, help="expected chunk size")
    p.add_argument("--symmetrize", action="store_true", help="insert both directions of every edge")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ctreegraph", description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true", help="emit one JSON object")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench-bfs")
    _graph_args(p)
    p.add_argument("--src", type=int, default=0)
    p.add_argument("--no-flat-snapshot", action="store_true")
    p.add_argument("--no-direction-opt", action="store_true")
    p.add_argument("--rounds", type=int, default=1)
    p.set_defaults(func=cmd_bench_bfs)

    p = sub.add_parser("bench-bc")
    _graph_args(p)
    p.add_argument("--src", type=int, default=0)
    p.set_defaults(func=cmd_bench_bc)

    p = sub.add_parser("bench-mis")
    _graph_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench_mis)

    p = sub.add_parser("two-hop")
    _graph_args(p)
    p.add_argument("--src", type=int, default=0)
    p.set_defaults(func=cmd_two_hop)

    p = sub.add_parser("stream")
    _graph_args(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--updates", help="file of '+ u v' / '- u v' lines")
    src.add_argument("--rmat", help="LOGN,M,A,B,C: M rMAT edges, each inserted in both directions")
    p.add_argument("--batch-size", type=int, default=1000)
    p.add_argument("--query", choices=["bfs", "two-hop", "none"], default="bfs")
    p.add_argument("--query-threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--src", type=int, default=0)
    p.add_argument("--no-check", action="store_true", help="skip the replay-oracle check")
    p.set_defaults(func=cmd_stream)

    p = sub.add_parser("stats")
    _graph_args(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("rmat")
    p.add_argument("--log-n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("--b", type=float, default=0.1)
    p.add_argument("--c", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--symmetrize", action="store_true", help="drop self-loops, write both directions")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rmat)
    return ap


def _params(args):
    return {k: v for k, v in vars(args).items() if k not in ("func", "json", "command")}


def main(argv=None) -> int:
    ap = build_parser()
    # accept --json after the subcommand too
    argv = list(sys.argv[1:] if argv is None else argv)
    as_json = "--json" in argv
    argv = [a for a in argv if a != "--json"]
    args = ap.parse_args(argv)
    args.json = as_json
    try:
        results, timings = args.func(args)
    except (ParseError, ContractViolation, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps({"command": args.command, "params": _params(args),
                          "results": results, "timings": timings}, sort_keys=True))
    elif args.command != "stats":
        _print_text(args.command, results, timings)
    return 0


def _print_text(command, results, timings):
    print(command)
    for k, v in results.items():
        if k == "vertices":
            continue
        print(f"  {k}: {v}")
    for k, v in timings.items():
        if k == "update_throughput":
            print(f"  {k}: {v:,.0f} edges/s")
        elif k == "latency_ratio":
            print(f"  {k}: {v:.2f}")
        elif isinstance(v, float):
            print(f"  {k}: {v:.4f}s")
        elif isinstance(v, list):
            print(f"  {k}: " + ", ".join(f"{x:.4f}s" for x in v))
        else:
            print(f"  {k}: {v}")


if __name__ == "__main__":
    sys.exit(main())
