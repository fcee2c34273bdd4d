import random

import numpy as np
import pytest

from ctreegraph import ctree, graph as G
from ctreegraph.errors import ContractViolation
from ctreegraph.traversal import FlatSnapshot


def oracle_dump(adj: dict):
    return {u: sorted(vs) for u, vs in adj.items()}


def random_graph(r, n, m, b=8):
    adj = [set() for _ in range(n)]
    for _ in range(m):
        adj[r.randrange(n)].add(r.randrange(n))
    return G.build_graph(n, [sorted(a) for a in adj], b), {u: set(a) for u, a in enumerate(adj)}


def test_build_graph_examples():
    g = G.build_graph(3, [[1], [0, 2], [1]])
    assert g.counts() == (3, 4)
    assert G.build_graph(2, [[], []]).counts() == (2, 0)
    assert G.empty_graph().counts() == (0, 0)


def test_build_graph_dedups_and_matches_oracle(rng):
    n = 200
    lists = [[rng.randrange(n) for _ in range(rng.randrange(30))] for _ in range(n)]
    g = G.build_graph(n, lists, 4)
    assert g.adjacency() == {u: sorted(set(a)) for u, a in enumerate(lists)}
    assert g.num_edges == sum(len(set(a)) for a in lists)
    G.audit(g)


def test_build_graph_length_mismatch():
    with pytest.raises(ContractViolation):
        G.build_graph(3, [[1]])


def test_find_vertex_and_vertex_ops(rng):
    g = G.build_graph(4, [[1, 2, 3], [0, 2], [], [0]])
    assert g.find_vertex(9) is None
    v0, v1, v2 = g.find_vertex(0), g.find_vertex(1), g.find_vertex(2)
    assert v2.degree() == 0
    assert v0.degree() == 3
    seen = []
    v0.map_neighbors(seen.append)
    assert seen == [1, 2, 3]
    assert v0.intersect_neighbors(v0).elements() == [1, 2, 3]
    assert v0.intersect_neighbors(v1).elements() == [2]
    gr, adj = random_graph(rng, 100, 3000)
    for _ in range(100):
        a, b = rng.randrange(100), rng.randrange(100)
        got = gr.find_vertex(a).intersect_neighbors(gr.find_vertex(b)).elements()
        assert got == sorted(adj[a] & adj[b])


def test_insert_edges_examples():
    g = G.build_graph(3, [[1], [0, 2], [1]])
    assert g.insert_edges([]).adjacency() == g.adjacency()
    assert g.insert_edges([(0, 1)]).num_edges == 4
    g2 = g.insert_edges([(7, 0), (7, 0), (2, 0)])
    assert g2.adjacency() == {0: [1], 1: [0, 2], 2: [0, 1], 7: [0]}
    assert g.adjacency() == {0: [1], 1: [0, 2], 2: [1]}


def test_delete_edges_examples():
    g = G.build_graph(3, [[1], [0, 2], [1]])
    assert g.delete_edges([(0, 2), (9, 9)]).adjacency() == g.adjacency()
    fresh = [(0, 2), (2, 0), (1, 1)]
    back = g.insert_edges(fresh).delete_edges(fresh)
    assert back.adjacency() == g.adjacency()
    dropped = g.delete_edges([(0, 1)], remove_singletons=True)
    assert dropped.adjacency() == {1: [0, 2], 2: [1]}
    kept = g.delete_edges([(0, 1)])
    assert kept.adjacency() == {0: [], 1: [0, 2], 2: [1]}


def test_negative_ids_rejected():
    g = G.empty_graph()
    with pytest.raises(ContractViolation):
        g.insert_edges([(-1, 2)])
    with pytest.raises(ContractViolation):
        g.insert_vertices([-3])


@pytest.mark.parametrize("b", [1, 2, 8, 256])
def test_random_update_sequence(b):
    r = random.Random(b)
    g, oracle = random_graph(r, 150, 1500, b)
    held = []
    for step in range(40):
        batch = [(r.randrange(170), r.randrange(170)) for _ in range(r.randrange(1, 300))]
        held.append((g, oracle_dump(oracle), g.fingerprint()))
        if r.random() < 0.6:
            g = g.insert_edges(batch)
            for u, v in batch:
                oracle.setdefault(u, set()).add(v)
        else:
            rs = r.random() < 0.5
            g = g.delete_edges(batch, remove_singletons=rs)
            touched = {u for u, _ in batch}
            for u, v in batch:
                if u in oracle:
                    oracle[u].discard(v)
            if rs:
                for u in touched:
                    if u in oracle and not oracle[u]:
                        del oracle[u]
        G.audit(g)
        assert g.adjacency() == oracle_dump(oracle)
        assert g.num_edges == sum(len(s) for s in oracle.values())
    for old, dump, fp in held:
        assert old.adjacency() == dump
        assert old.fingerprint() == fp


def test_vertex_insert_delete(rng):
    g = G.build_graph(3, [[1], [0, 2], [1]])
    assert g.insert_vertices([1]).adjacency() == g.adjacency()
    assert g.delete_vertices([42]).adjacency() == g.adjacency()
    g2 = g.insert_vertices([5, 4, 5])
    assert g2.vertices() == [0, 1, 2, 4, 5] and g2.degree(5) == 0
    g3 = g2.delete_vertices([1, 4])
    # dangling edges to deleted ids stay in place
    assert g3.adjacency() == {0: [1], 2: [1], 5: []}
    ids = set(range(50))
    h = G.build_graph(50, [[] for _ in range(50)])
    for _ in range(30):
        add = {rng.randrange(80) for _ in range(10)}
        rem = {rng.randrange(80) for _ in range(10)}
        h = h.insert_vertices(add).delete_vertices(rem)
        ids = (ids | add) - rem
        assert h.vertices() == sorted(ids)
        G.audit(h)


def test_undirected_batches_keep_symmetry(rng):
    g = G.build_graph(60, [[] for _ in range(60)])
    for _ in range(30):
        pairs = [(rng.randrange(60), rng.randrange(60)) for _ in range(40)]
        both = pairs + [(v, u) for u, v in pairs]
        g = g.insert_edges(both) if rng.random() < 0.7 else g.delete_edges(both)
        adj = g.adjacency()
        for u, vs in adj.items():
            for v in vs:
                assert u in adj.get(v, [])


def test_flat_snapshot():
    assert len(G.empty_graph().flat_snapshot()) == 0
    g = G.build_graph(4, [[1], [0, 2, 3], [], [1]])
    snap = g.flat_snapshot()
    assert isinstance(snap, FlatSnapshot)
    for v in range(4):
        assert snap.degree(v) == g.find_vertex(v).degree()
        assert snap[v] is g.edge_tree(v)
    with pytest.raises(ContractViolation):
        g.insert_vertices([10]).flat_snapshot()


def test_rebuild_keeps_edges(rng):
    g, oracle = random_graph(rng, 80, 800, 256)
    for b in (1, 2, 64):
        h = G.rebuild(g, b)
        assert h.b == b and h.adjacency() == g.adjacency()
        for _, et in h.items():
            ctree.audit(et)


def test_from_csr_and_edge_arrays(rng):
    g, _ = random_graph(rng, 50, 400)
    src, dst = g.edge_arrays()
    offsets = np.searchsorted(src, np.arange(51))
    assert G.from_csr(offsets, dst, g.b).adjacency() == g.adjacency()


def test_reachable_nodes_counts_shared_once():
    g = G.build_graph(100, [list(range(i)) for i in range(100)], 2)
    g2 = g.insert_edges([(0, 5)])
    both = G.reachable_nodes([g, g2])
    assert G.reachable_nodes([g]) < both < 2 * G.reachable_nodes([g])
