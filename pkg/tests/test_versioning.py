import gc
import random
import threading
import time

import pytest

from ctreegraph import graph as G, pftree
from ctreegraph.errors import ContractViolation
from ctreegraph.stream import ReplayOracle
from ctreegraph.versioning import VersionedGraph


def small_graph():
    return G.build_graph(4, [[1], [0, 2], [1, 3], [2]], 2)


def test_fresh_acquire():
    vg = VersionedGraph(small_graph())
    g = vg.acquire()
    assert g.timestamp == 0
    assert vg.acquire().timestamp == 0


def test_set_then_acquire_and_monotone_timestamps():
    vg = VersionedGraph(small_graph())
    with vg.writer() as tok:
        stamps = []
        for i in range(5):
            cur = vg.acquire()
            new = vg.set(cur.insert_edges([(i, 3)]), tok)
            vg.release(cur)
            got = vg.acquire()
            assert got is new
            vg.release(got)
            stamps.append(new.timestamp)
    assert stamps == [1, 2, 3, 4, 5]


def test_single_writer_enforced():
    vg = VersionedGraph(small_graph())
    tok = vg.claim_writer()
    with pytest.raises(ContractViolation):
        vg.claim_writer()
    with pytest.raises(ContractViolation):
        vg.set(small_graph(), None)
    vg.close_writer(tok)
    with pytest.raises(ContractViolation):
        vg.set(small_graph(), tok)
    tok2 = vg.claim_writer()
    vg.set(small_graph(), tok2)


def test_release_semantics():
    vg = VersionedGraph(small_graph())
    old = vg.acquire()
    with vg.writer() as tok:
        vg.set(old.insert_edges([(0, 3)]), tok)
    assert vg.release(old) is True
    with pytest.raises(ContractViolation):
        vg.release(old)
    latest = vg.acquire()
    assert vg.release(latest) is False
    with pytest.raises(ContractViolation):
        vg.release(latest)


def test_two_holders_of_old_version():
    vg = VersionedGraph(small_graph())
    a = vg.acquire()
    b = vg.acquire()
    with vg.writer() as tok:
        vg.commit(lambda g: g.insert_edges([(3, 0)]), tok)
    assert vg.release(a) is False
    assert vg.release(b) is True
    assert vg.live_timestamps() == [1]


def test_reclamation_after_release():
    gc.collect()
    base = pftree.live_nodes()
    r = random.Random(5)
    vg = VersionedGraph(G.build_graph(200, [[r.randrange(200) for _ in range(20)] for _ in range(200)], 4))
    held = []
    with vg.writer() as tok:
        for _ in range(30):
            if r.random() < 0.5:
                held.append(vg.acquire())
            batch = [(r.randrange(200), r.randrange(200)) for _ in range(50)]
            vg.commit(lambda g: g.insert_edges(batch), tok)
    latest = vg.acquire()
    assert pftree.live_nodes() - base == G.reachable_nodes(held + [latest])
    for g in held:
        vg.release(g)
    del held, g
    gc.collect()
    assert pftree.live_nodes() - base == G.reachable_nodes([latest])
    vg.release(latest)
    del latest, vg
    gc.collect()
    assert pftree.live_nodes() == base


def test_concurrent_readers_see_committed_prefixes():
    r = random.Random(9)
    n = 64
    g0 = G.build_graph(n, [[] for _ in range(n)], 8)
    vg = VersionedGraph(g0)
    batches = []
    for _ in range(1000):
        batch = [(r.randrange(n), r.randrange(n)) for _ in range(r.randint(1, 6))]
        batches.append((r.random() < 0.75, batch))
    oracle = ReplayOracle([], [])
    for ins, batch in batches:
        signs = [1 if ins else -1] * len(batch)
        import numpy as np
        oracle.apply(np.array(signs), np.array([u for u, _ in batch]), np.array([v for _, v in batch]))
    seen = []
    stop = threading.Event()

    def reader():
        last = -1
        while not stop.is_set():
            g = vg.acquire()
            try:
                seen.append((g.timestamp, g.fingerprint(), last))
                last = g.timestamp
            finally:
                vg.release(g)

    threads = [threading.Thread(target=reader) for _ in range(4)]
    for t in threads:
        t.start()
    with vg.writer() as tok:
        for ins, batch in batches:
            vg.commit(lambda g: g.insert_edges(batch) if ins else g.delete_edges(batch), tok)
    stop.set()
    for t in threads:
        t.join()
    assert seen
    for ts, fp, prev in seen:
        assert fp == oracle.history[ts]
        assert ts >= prev
    assert vg.latest_timestamp == 1000
    with vg.snapshot() as g:
        assert g.fingerprint() == oracle.fp


def test_readers_not_starved_by_busy_writer():
    r = random.Random(3)
    n = 2000
    vg = VersionedGraph(G.build_graph(n, [[r.randrange(n) for _ in range(8)] for _ in range(n)], 16))

    def reader_rate(seconds, stop_writer):
        done = 0
        end = time.perf_counter() + seconds
        while time.perf_counter() < end:
            g = vg.acquire()
            vg.release(g)
            done += 1
        stop_writer.set()
        return done / seconds

    idle = reader_rate(0.5, threading.Event())
    stop = threading.Event()

    def writer():
        with vg.writer() as tok:
            while not stop.is_set():
                batch = [(r.randrange(n), r.randrange(n)) for _ in range(200)]
                vg.commit(lambda g: g.insert_edges(batch), tok)

    w = threading.Thread(target=writer)
    w.start()
    busy = reader_rate(1.0, stop)
    w.join()
    assert vg.latest_timestamp > 0
    assert busy * 10 >= idle
