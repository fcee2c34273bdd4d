"""Immutable graph snapshots: a vertex tree whose values are edge C-trees.

The vertex tree is augmented with the number of directed edges below each
node, so ``num_edges`` is O(1).  Every update returns a new
:class:`GraphVersion`; the old one stays valid and shares all untouched
structure with the new one.
"""
from __future__ import annotations

from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from . import ctree
from . import pftree
from .ctree import CTree, DEFAULT_B
from .errors import ContractViolation
from .hashing import hash64_array


def _edge_count(et: CTree) -> int:
    return et.size


vertex_ops = pftree.TreeOps(measure=_edge_count)


class Vertex:
    """Read-only handle on one vertex of a snapshot."""

    __slots__ = ("id", "edges")

    def __init__(self, vid: int, edges: CTree):
        self.id = vid
        self.edges = edges

    def __repr__(self):
        return f"Vertex({self.id}, degree={self.degree()})"

    def degree(self) -> int:
        return self.edges.size

    def neighbors(self) -> list[int]:
        return self.edges.elements()

    def map_neighbors(self, f: Callable[[int], object]) -> None:
        ctree.map(self.edges, f)

    def intersect_neighbors(self, other: "Vertex") -> CTree:
        return ctree.intersection(self.edges, other.edges)


class GraphVersion:
    __slots__ = ("vertex_tree", "timestamp", "b")

    def __init__(self, vertex_tree=None, timestamp: int = 0, b: int = DEFAULT_B):
        self.vertex_tree = vertex_tree
        self.timestamp = timestamp
        self.b = b

    def __repr__(self):
        n, m = self.counts()
        return f"GraphVersion(n={n}, m={m}, timestamp={self.timestamp}, b={self.b})"

    # -- queries ----------------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return pftree.size(self.vertex_tree)

    @property
    def num_edges(self) -> int:
        return 0 if self.vertex_tree is None else self.vertex_tree.aug

    def counts(self) -> tuple[int, int]:
        return self.num_vertices, self.num_edges

    def find_vertex(self, v: int) -> Vertex | None:
        et = pftree.find(self.vertex_tree, v)
        return None if et is None else Vertex(v, et)

    def edge_tree(self, v: int) -> CTree | None:
        return pftree.find(self.vertex_tree, v)

    def has_vertex(self, v: int) -> bool:
        return pftree.contains(self.vertex_tree, v)

    def degree(self, v: int) -> int:
        et = pftree.find(self.vertex_tree, v)
        return 0 if et is None else et.size

    def neighbors(self, v: int) -> list[int]:
        et = pftree.find(self.vertex_tree, v)
        return [] if et is None else et.elements()

    def vertices(self) -> list[int]:
        return pftree.keys(self.vertex_tree)

    def items(self) -> Iterator[tuple[int, CTree]]:
        return pftree.items(self.vertex_tree)

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, et in pftree.items(self.vertex_tree):
            for v in et.elements():
                yield u, v

    def adjacency(self) -> dict[int, list[int]]:
        """Full dump ``{vertex: sorted neighbours}``."""
        return {u: et.elements() for u, et in pftree.items(self.vertex_tree)}

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """All directed edges as parallel ``(src, dst)`` int64 arrays, sorted."""
        srcs = []
        dsts: list[int] = []
        degs = []
        for u, et in pftree.items(self.vertex_tree):
            xs = et.elements()
            if xs:
                srcs.append(u)
                degs.append(len(xs))
                dsts.extend(xs)
        src = np.repeat(np.array(srcs, dtype=np.int64), np.array(degs, dtype=np.int64))
        return src, np.array(dsts, dtype=np.int64)

    def is_compact(self) -> bool:
        """True when the vertex ids are exactly ``0 .. n-1``."""
        n = self.num_vertices
        if n == 0:
            return True
        return pftree.first(self.vertex_tree)[0] == 0 and pftree.last(self.vertex_tree)[0] == n - 1

    def fingerprint(self) -> int:
        return edge_fingerprint(*self.edge_arrays())

    # -- updates ------------------------------------------------------------

    def _derive(self, vertex_tree) -> "GraphVersion":
        return GraphVersion(vertex_tree, self.timestamp, self.b)

    def insert_edges(self, batch) -> "GraphVersion":
        srcs, trees = _batch_trees(batch, self.b)
        if not srcs:
            return self
        return self._derive(vertex_ops.multi_insert_sorted(self.vertex_tree, srcs, trees, _union_edges))

    def delete_edges(self, batch, remove_singletons: bool = False) -> "GraphVersion":
        srcs, trees = _batch_trees(batch, self.b)
        if not srcs:
            return self
        f = _difference_drop_empty if remove_singletons else _difference_edges
        return self._derive(vertex_ops.multi_update(self.vertex_tree, srcs, trees, f))

    def insert_vertices(self, ids: Iterable[int]) -> "GraphVersion":
        ks = _sorted_ids(ids)
        if not ks:
            return self
        e = ctree.empty(self.b)
        return self._derive(vertex_ops.multi_insert_sorted(self.vertex_tree, ks, [e] * len(ks), _keep_old))

    def delete_vertices(self, ids: Iterable[int]) -> "GraphVersion":
        """Drop vertices and their out-edge trees.

        Edges that other vertices hold *to* the deleted ids are left in place.
        """
        ks = _sorted_ids(ids)
        if not ks:
            return self
        return self._derive(vertex_ops.multi_delete(self.vertex_tree, ks))

    def flat_snapshot(self):
        from .traversal import FlatSnapshot
        return FlatSnapshot.of(self)


def _sorted_ids(ids) -> list[int]:
    ks = sorted(set(int(i) for i in ids))
    if ks and ks[0] < 0:
        raise ContractViolation("vertex ids must be non-negative")
    return ks


def _keep_old(old, new):
    return old


def _union_edges(old: CTree, new: CTree) -> CTree:
    return ctree.union(old, new)


def _difference_edges(old: CTree, new: CTree) -> CTree:
    return ctree.difference(old, new)


def _difference_drop_empty(old: CTree, new: CTree):
    out = ctree.difference(old, new)
    return pftree.REMOVE if not out else out


def _sorted_unique_pairs(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if len(u) == 0:
        return u, v
    if int(u.max()) < (1 << 31) and int(v.max()) < (1 << 32):
        key = np.unique((u << 32) | v)
        return key >> 32, key & 0xFFFFFFFF
    order = np.lexsort((v, u))
    u = u[order]
    v = v[order]
    keep = np.ones(len(u), dtype=bool)
    keep[1:] = (u[1:] != u[:-1]) | (v[1:] != v[:-1])
    return u[keep], v[keep]


def group_edges(batch) -> tuple[list[int], np.ndarray, np.ndarray]:
    """Sort a batch of ``(u, v)`` pairs, drop duplicates and group by source.

    Returns ``(sources, offsets, targets)``: the targets of ``sources[i]``
    are ``targets[offsets[i]:offsets[i+1]]``.
    """
    arr = np.asarray(batch, dtype=np.int64)
    if arr.size == 0:
        return [], np.zeros(1, dtype=np.int64), np.zeros(0, dtype=np.int64)
    arr = arr.reshape(-1, 2)
    if (arr < 0).any():
        raise ContractViolation("vertex ids must be non-negative")
    u, v = _sorted_unique_pairs(arr[:, 0].copy(), arr[:, 1].copy())
    starts = np.flatnonzero(np.r_[True, u[1:] != u[:-1]])
    offsets = np.r_[starts, len(u)].astype(np.int64)
    return u[starts].tolist(), offsets, v


def _batch_trees(batch, b):
    srcs, offsets, targets = group_edges(batch)
    if not srcs:
        return [], []
    return srcs, ctree.build_many(offsets, targets, b)


def edge_fingerprint(src, dst) -> int:
    """Order-independent 64-bit fingerprint of a set of directed edges."""
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    if len(src) == 0:
        return 0
    h = hash64_array(hash64_array(src) ^ dst.astype(np.uint64))
    return int(h.sum(dtype=np.uint64))


# -- construction -------------------------------------------------------------

def empty_graph(b: int = DEFAULT_B) -> GraphVersion:
    return GraphVersion(None, 0, b)


def build_graph(n: int, adjacency: Sequence[Iterable[int]], b: int = DEFAULT_B) -> GraphVersion:
    """Graph on vertices ``0..n-1`` where vertex ``i`` points at ``adjacency[i]``."""
    if len(adjacency) != n:
        raise ContractViolation(f"expected {n} neighbour lists, got {len(adjacency)}")
    lens = np.array([len(a) for a in adjacency], dtype=np.int64)
    src = np.repeat(np.arange(n, dtype=np.int64), lens)
    dst = np.fromiter((x for a in adjacency for x in a), dtype=np.int64, count=int(lens.sum()))
    return from_edge_arrays(n, src, dst, b)


def from_edge_arrays(n: int, src: np.ndarray, dst: np.ndarray, b: int = DEFAULT_B) -> GraphVersion:
    """Graph on vertices ``0..n-1`` from (possibly unsorted, duplicated) edge arrays."""
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    if len(src) and (src.min() < 0 or dst.min() < 0):
        raise ContractViolation("vertex ids must be non-negative")
    if len(src) and src.max() >= n:
        raise ContractViolation("edge source outside 0..n-1")
    u, v = _sorted_unique_pairs(src, dst)
    offsets = np.searchsorted(u, np.arange(n + 1, dtype=np.int64))
    trees = ctree.build_many(offsets, v, b)
    return GraphVersion(vertex_ops.build_sorted(range(n), trees), 0, b)


def from_csr(offsets: np.ndarray, targets: np.ndarray, b: int = DEFAULT_B) -> GraphVersion:
    n = len(offsets) - 1
    lens = np.diff(np.asarray(offsets, dtype=np.int64))
    src = np.repeat(np.arange(n, dtype=np.int64), lens)
    return from_edge_arrays(n, src, targets, b)


def rebuild(g: GraphVersion, b: int) -> GraphVersion:
    """Same edge set re-chunked with a different ``b`` (vertex ids kept)."""
    src, dst = g.edge_arrays()
    ids = g.vertices()
    u, v = _sorted_unique_pairs(src, dst)
    offsets = np.searchsorted(u, np.array(ids + [ids[-1] + 1 if ids else 0], dtype=np.int64))
    trees = ctree.build_many(offsets, v, b)
    return GraphVersion(vertex_ops.build_sorted(ids, trees), g.timestamp, b)


def audit(g: GraphVersion) -> None:
    """Check balance, augmentation and that m equals a traversal recount."""
    pftree.check_balance(g.vertex_tree)
    vertex_ops.check_aug(g.vertex_tree)
    m = 0
    for _, et in pftree.items(g.vertex_tree):
        m += len(et.elements())
    if m != g.num_edges:
        raise AssertionError(f"augmented edge count {g.num_edges} != traversal count {m}")


def reachable_nodes(versions: Iterable[GraphVersion]) -> int:
    """Distinct tree nodes (vertex-tree and head-tree) reachable from ``versions``."""
    seen: set = set()
    versions = list(versions)
    pftree.count_nodes([g.vertex_tree for g in versions], seen)
    etrees = {}
    for g in versions:
        for _, et in pftree.items(g.vertex_tree):
            if et.tree is not None:
                etrees[id(et.tree)] = et.tree
    pftree.count_nodes(list(etrees.values()), seen)
    return len(seen)
