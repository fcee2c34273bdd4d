import collections
import math
import random

import pytest

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return random.Random(12345)


def random_set(r: random.Random, max_size=1000):
    """Log-uniform size in [0, max_size]; universes from dense to 62-bit sparse."""
    size = min(max_size, int(2 ** r.uniform(0, math.log2(max_size + 1))) - 1)
    universe = r.choice([2 * size + 10, 1 << 16, 1 << 40, 1 << 62])
    if universe < 4 * size:
        return set(r.sample(range(universe), size))
    out = set()
    while len(out) < size:
        out.add(r.randrange(universe))
    return out


def bfs_reference(n, adj, src):
    """Queue BFS over plain adjacency lists."""
    dist = [-1] * n
    dist[src] = 0
    q = collections.deque([src])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                q.append(v)
    return dist


def brandes_reference(n, adj, src):
    """Textbook single-source Brandes with predecessor lists."""
    sigma = [0] * n
    dist = [-1] * n
    preds = [[] for _ in range(n)]
    sigma[src] = 1
    dist[src] = 0
    order = []
    q = collections.deque([src])
    while q:
        v = q.popleft()
        order.append(v)
        for w in adj[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                q.append(w)
            if dist[w] == dist[v] + 1:
                sigma[w] += sigma[v]
                preds[w].append(v)
    delta = [0.0] * n
    for w in reversed(order):
        for v in preds[w]:
            delta[v] += sigma[v] / sigma[w] * (1 + delta[w])
    delta[src] = 0.0
    return delta


def random_symmetric_adj(r: random.Random, n, p):
    adj = [set() for _ in range(n)]
    for u in range(n):
        for v in range(u + 1, n):
            if r.random() < p:
                adj[u].add(v)
                adj[v].add(u)
    return [sorted(a) for a in adj]
