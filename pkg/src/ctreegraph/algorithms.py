"""Queries over one immutable snapshot: BFS, single-source BC, MIS and 2-hop."""
from __future__ import annotations

from .errors import ContractViolation
from .graph import GraphVersion
from .hashing import MASK64, hash64
from .traversal import VertexSubset, edge_map

UNREACHED = -1
SIGMA_LIMIT = 1 << 63


def _check_source(g: GraphVersion, src: int, compact: bool = True):
    if not g.has_vertex(src):
        raise ContractViolation(f"source vertex {src} is not in the graph")
    if compact and not g.is_compact():
        raise ContractViolation("this query needs vertex ids 0..n-1")


def bfs(g: GraphVersion, src: int, use_flat: bool = True, direction_opt: bool = True) -> list[int]:
    """Hop distances from ``src``; ``UNREACHED`` (-1) where no path exists."""
    _check_source(g, src)
    n = g.num_vertices
    snap = g.flat_snapshot() if use_flat else None
    dist = [UNREACHED] * n
    dist[src] = 0
    frontier = VertexSubset.single(n, src)
    level = 0

    def cond(v):
        return v < n and dist[v] < 0

    while frontier:
        level += 1

        def update(u, v, level=level):
            if dist[v] < 0:
                dist[v] = level
                return True
            return False

        frontier = edge_map(g, frontier, update, cond, snap, direction_opt)
    return dist


def bc(g: GraphVersion, src: int, use_flat: bool = True, direction_opt: bool = True) -> list[float]:
    """Brandes dependency of every vertex on shortest paths out of ``src``."""
    _check_source(g, src)
    n = g.num_vertices
    snap = g.flat_snapshot() if use_flat else None
    sigma = [0] * n
    visited = bytearray(n)
    sigma[src] = 1
    visited[src] = 1
    levels = [[src]]
    frontier = VertexSubset.single(n, src)

    def cond(v):
        return v < n and not visited[v]

    def update(u, v):
        first = sigma[v] == 0
        s = sigma[v] + sigma[u]
        if s >= SIGMA_LIMIT:
            raise OverflowError(f"shortest-path count at vertex {v} exceeds 64 bits")
        sigma[v] = s
        return first

    while True:
        frontier = edge_map(g, frontier, update, cond, snap, direction_opt)
        if not frontier:
            break
        ids = frontier.ids()
        for v in ids:
            visited[v] = 1
        levels.append(ids)

    depth = [UNREACHED] * n
    for d, ids in enumerate(levels):
        for v in ids:
            depth[v] = d
    lookup = snap.get if snap is not None else g.edge_tree
    delta = [0.0] * n
    for d in range(len(levels) - 2, -1, -1):
        nxt = d + 1
        for w in levels[d]:
            et = lookup(w)
            if et is None:
                continue
            acc = 0.0
            sw = sigma[w]
            for v in et.elements():
                if v < n and depth[v] == nxt:
                    acc += sw / sigma[v] * (1.0 + delta[v])
            delta[w] = acc
    delta[src] = 0.0
    return delta


def _priority(seed: int, v: int) -> tuple[int, int]:
    return hash64(v ^ ((seed * 0x9E3779B97F4A7C15) & MASK64)), v


def mis(g: GraphVersion, seed: int = 0) -> list[bool]:
    """Maximal independent set by rounds of local priority minima (symmetric graphs)."""
    if not g.is_compact():
        raise ContractViolation("this query needs vertex ids 0..n-1")
    n = g.num_vertices
    snap = g.flat_snapshot()
    nbrs = [[u for u in et.elements() if u != v and u < n] if et is not None else []
            for v, et in enumerate(snap.trees)]
    prio = [_priority(seed, v) for v in range(n)]
    IN, OUT, UNDECIDED = 1, 2, 0
    state = bytearray(n)
    remaining = list(range(n))
    while remaining:
        chosen = []
        for v in remaining:
            pv = prio[v]
            for u in nbrs[v]:
                if state[u] == UNDECIDED and prio[u] < pv:
                    break
            else:
                chosen.append(v)
        for v in chosen:
            state[v] = IN
        for v in chosen:
            for u in nbrs[v]:
                if state[u] == UNDECIDED:
                    state[u] = OUT
        remaining = [v for v in remaining if state[v] == UNDECIDED]
    return [s == IN for s in state]


def two_hop(g: GraphVersion, src: int, direction_opt: bool = True) -> set[int]:
    """Vertices at most two hops from ``src``, excluding ``src`` itself."""
    _check_source(g, src, compact=False)
    n = max(g.num_vertices, src + 1)

    def take(u, v):
        return True

    one = edge_map(g, VertexSubset.single(n, src), take, None, None, direction_opt)
    two = edge_map(g, one, take, None, None, direction_opt)
    out = one.to_set() | two.to_set()
    out.discard(src)
    return out
