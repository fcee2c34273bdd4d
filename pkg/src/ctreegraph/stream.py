"""Concurrent update + query driver.

One writer thread applies update batches and publishes each as a new
version while query threads repeatedly acquire the latest version, run a
query on it, record what they saw and release it.  A replay oracle, kept
as a plain Python set of edges, checks that every observed version is
exactly the initial graph plus a prefix of the committed batches.
"""
from __future__ import annotations

import bisect
import statistics
import threading
import time
from dataclasses import dataclass, field

import numpy as np

from . import algorithms
from .graph import GraphVersion
from .hashing import MASK64, hash64
from .versioning import VersionedGraph


@dataclass
class Observation:
    thread: int
    timestamp: int
    fingerprint: int | None
    start: float
    end: float
    latency: float
    size: int  # n + m of the queried version


@dataclass
class StreamResult:
    report: dict
    vg: VersionedGraph
    observations: list = field(default_factory=list)


def edge_hash(u: int, v: int) -> int:
    return hash64(hash64(u) ^ v)


class ReplayOracle:
    """Edge set plus running order-independent fingerprint of every prefix."""

    def __init__(self, src, dst):
        self.edges = set(zip(np.asarray(src).tolist(), np.asarray(dst).tolist()))
        self.fp = 0
        for u, v in self.edges:
            self.fp = (self.fp + edge_hash(u, v)) & MASK64
        self.history = [self.fp]

    def apply(self, signs, us, vs) -> int:
        edges = self.edges
        fp = self.fp
        for s, u, v in zip(signs.tolist(), us.tolist(), vs.tolist()):
            e = (u, v)
            if s > 0:
                if e not in edges:
                    edges.add(e)
                    fp = (fp + edge_hash(u, v)) & MASK64
            elif e in edges:
                edges.remove(e)
                fp = (fp - edge_hash(u, v)) & MASK64
        self.fp = fp
        self.history.append(fp)
        return fp


def apply_batch(g: GraphVersion, signs, us, vs) -> GraphVersion:
    """Apply updates in order, one insert/delete call per run of equal signs."""
    if len(signs) == 0:
        return g
    cuts = np.flatnonzero(np.diff(signs)) + 1
    bounds = np.r_[0, cuts, len(signs)]
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        pairs = np.stack([us[lo:hi], vs[lo:hi]], axis=1)
        if signs[lo] > 0:
            g = g.insert_edges(pairs)
        else:
            g = g.delete_edges(pairs)
    return g


def _run_query(kind: str, g: GraphVersion, src: int):
    if kind == "bfs":
        return algorithms.bfs(g, src)
    if kind == "two-hop":
        return algorithms.two_hop(g, src)
    raise ValueError(f"unknown query kind {kind!r}")


def _summary(xs):
    if not xs:
        return {"count": 0}
    return {"count": len(xs), "mean": statistics.fmean(xs), "median": statistics.median(xs),
            "max": max(xs), "min": min(xs)}


def run_readers(vg: VersionedGraph, kind: str, threads: int, src: int, stop: threading.Event,
                min_queries: int = 1, fingerprint: bool = True):
    """Run ``threads`` query loops until ``stop`` is set and each did ``min_queries``."""
    out: list[Observation] = []
    lock = threading.Lock()

    def loop(tid):
        done = 0
        while done < min_queries or not stop.is_set():
            start = time.perf_counter()
            g = vg.acquire()
            try:
                t0 = time.perf_counter()
                _run_query(kind, g, src)
                t1 = time.perf_counter()
                fp = g.fingerprint() if fingerprint else None
                obs = Observation(tid, g.timestamp, fp, start, t1, t1 - t0, g.num_vertices + g.num_edges)
            finally:
                vg.release(g)
            del g
            with lock:
                out.append(obs)
            done += 1

    ts = [threading.Thread(target=loop, args=(i,), daemon=True) for i in range(threads)]
    for t in ts:
        t.start()
    return ts, out


def run_stream(g0: GraphVersion, signs, us, vs, batch_size: int, query: str = "bfs",
               query_threads: int = 1, src: int = 0, check: bool = True,
               oracle_edges=None, isolated_queries: int = 1) -> StreamResult:
    """Stream ``(signs, us, vs)`` into ``g0`` in batches while queries run.

    ``oracle_edges`` is the ``(src, dst)`` edge list the oracle starts from;
    by default it is read off ``g0``.  With ``check`` every observed version
    is compared against the oracle.  ``isolated_queries`` per thread are run
    on the initial and the final version with no writer active, as the
    latency baseline.
    """
    signs = np.asarray(signs, dtype=np.int64)
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    vg = VersionedGraph(g0)
    del g0
    oracle = None
    if check:
        if oracle_edges is None:
            with vg.snapshot() as g:
                oracle_edges = g.edge_arrays()
        oracle = ReplayOracle(*oracle_edges)
    querying = query != "none" and query_threads > 0

    isolated: list[Observation] = []
    if querying and isolated_queries:
        isolated += _isolated(vg, query, query_threads, src, isolated_queries, check)

    bounds = list(range(0, len(signs), batch_size)) + [len(signs)]
    commits = []
    stop = threading.Event()
    readers, concurrent = ([], [])
    if querying:
        readers, concurrent = run_readers(vg, query, query_threads, src, stop, fingerprint=check)

    def writer():
        with vg.writer() as token:
            for lo, hi in zip(bounds[:-1], bounds[1:]):
                if hi <= lo:
                    continue
                t0 = time.perf_counter()
                g = vg.acquire()
                new = apply_batch(g, signs[lo:hi], us[lo:hi], vs[lo:hi])
                pub = vg.set(new, token)
                vg.release(g)
                t1 = time.perf_counter()
                commits.append((pub.timestamp, hi - lo, t0, t1))
                del g, new, pub

    t_start = time.perf_counter()
    w = threading.Thread(target=writer)
    w.start()
    w.join()
    t_write = time.perf_counter() - t_start
    stop.set()
    for t in readers:
        t.join()

    if querying and isolated_queries:
        isolated += _isolated(vg, query, query_threads, src, isolated_queries, check)

    report = _report(vg, signs, commits, t_write, concurrent, isolated, query, query_threads, batch_size)
    if oracle is not None:
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            if hi > lo:
                oracle.apply(signs[lo:hi], us[lo:hi], vs[lo:hi])
        report["check"] = _check(vg, oracle, concurrent, commits)
    return StreamResult(report, vg, concurrent + isolated)


def _isolated(vg, kind, threads, src, per_thread, fingerprint):
    stop = threading.Event()
    stop.set()
    ts, out = run_readers(vg, kind, threads, src, stop, min_queries=per_thread, fingerprint=fingerprint)
    for t in ts:
        t.join()
    return out


def _report(vg, signs, commits, t_write, concurrent, isolated, query, threads, batch_size):
    busy = sum(t1 - t0 for _, _, t0, t1 in commits)
    total = int(len(signs))
    with vg.snapshot() as g:
        n, m = g.counts()
        ts = g.timestamp
    r = {
        "updates": total,
        "batches": len(commits),
        "batch_size": batch_size,
        "final_timestamp": ts,
        "final_n": n,
        "final_m": m,
        "writer_wall_seconds": t_write,
        "writer_busy_seconds": busy,
        "update_throughput": total / busy if busy > 0 else 0.0,
        # per-batch commit time divided by the batch size
        "visibility_latency_per_edge": _summary([(t1 - t0) / k for _, k, t0, t1 in commits]),
        "query": query,
        "query_threads": threads,
    }
    if query != "none":
        cl = [o.latency for o in concurrent]
        il = [o.latency for o in isolated]
        cn = [o.latency / max(o.size, 1) for o in concurrent]
        inorm = [o.latency / max(o.size, 1) for o in isolated]
        r["query_latency_concurrent"] = _summary(cl)
        r["query_latency_isolated"] = _summary(il)
        r["query_seconds_per_element_concurrent"] = _summary(cn)
        r["query_seconds_per_element_isolated"] = _summary(inorm)
        if cn and inorm:
            r["latency_ratio"] = statistics.median(cn) / statistics.median(inorm)
    return r


def _check(vg, oracle, observations, commits) -> dict:
    bad = []
    for o in observations:
        if o.fingerprint is not None and o.fingerprint != oracle.history[o.timestamp]:
            bad.append(o.timestamp)
    # real-time order: a query that started after batch t was published sees t or newer
    ends = [t1 for _, _, _, t1 in commits]
    stamps = [ts for ts, _, _, _ in commits]
    stale = 0
    for o in observations:
        i = bisect.bisect_right(ends, o.start)
        newest = stamps[i - 1] if i else 0
        if o.timestamp < newest:
            stale += 1
    with vg.snapshot() as g:
        final_fp = g.fingerprint()
        final_edges = set(zip(*(a.tolist() for a in g.edge_arrays())))
    return {
        "observations": len(observations),
        "distinct_versions_seen": len({o.timestamp for o in observations}),
        "fingerprint_mismatches": len(bad),
        "stale_reads": stale,
        "final_matches_oracle": final_fp == oracle.fp and final_edges == oracle.edges,
    }
