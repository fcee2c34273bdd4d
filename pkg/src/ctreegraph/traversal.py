"""Frontier traversal over graph snapshots: vertex subsets, flat snapshots, edge_map.

Dense (pull) traversal scans the edge tree of each candidate target for
in-neighbours in the frontier, so it assumes a symmetric graph.
"""
from __future__ import annotations

from typing import Callable, Iterable

from . import pftree
from .ctree import CTree
from .errors import ContractViolation
from .graph import GraphVersion

# switch to dense when |U| + sum of out-degrees exceeds m / DENSE_DIVISOR
DENSE_DIVISOR = 20


class VertexSubset:
    """A set of vertex ids over ``[0, n)``, held as an id list or a flag array."""

    __slots__ = ("n", "_ids", "_flags", "_size")

    def __init__(self, n: int, ids=None, flags=None):
        self.n = n
        self._ids = ids
        self._flags = flags
        if ids is not None:
            self._size = len(ids)
        elif flags is not None:
            self._size = None
        else:
            self._ids = []
            self._size = 0

    @classmethod
    def sparse(cls, n: int, ids: Iterable[int]) -> "VertexSubset":
        ids = list(dict.fromkeys(ids))
        return cls(n, ids=ids)

    @classmethod
    def dense(cls, n: int, flags) -> "VertexSubset":
        flags = bytearray(flags)
        if len(flags) != n:
            raise ContractViolation(f"dense subset needs {n} flags, got {len(flags)}")
        return cls(n, flags=flags)

    @classmethod
    def single(cls, n: int, v: int) -> "VertexSubset":
        return cls(n, ids=[v])

    @property
    def is_dense(self) -> bool:
        return self._ids is None

    def __len__(self):
        if self._size is None:
            self._size = self._flags.count(1)
        return self._size

    def __bool__(self):
        return len(self) > 0

    def __contains__(self, v):
        if self._ids is None:
            return 0 <= v < self.n and self._flags[v] == 1
        return v in set(self._ids)

    def __repr__(self):
        kind = "dense" if self.is_dense else "sparse"
        return f"VertexSubset({kind}, n={self.n}, size={len(self)})"

    def ids(self) -> list[int]:
        if self._ids is None:
            f = self._flags
            self._ids = [v for v in range(self.n) if f[v]]
        return self._ids

    def flags(self) -> bytearray:
        if self._flags is None:
            f = bytearray(self.n)
            for v in self._ids:
                f[v] = 1
            self._flags = f
        return self._flags

    def to_set(self) -> set[int]:
        return set(self.ids())


class FlatSnapshot:
    """Array of edge-tree handles indexed by vertex id, taken from one version."""

    __slots__ = ("trees", "version")

    def __init__(self, trees: list, version: GraphVersion | None = None):
        self.trees = trees
        self.version = version

    @classmethod
    def of(cls, g: GraphVersion) -> "FlatSnapshot":
        n = g.num_vertices
        trees: list[CTree | None] = [None] * n
        for v, et in pftree.items(g.vertex_tree):
            if v >= n:
                raise ContractViolation(f"vertex id {v} >= n={n}; flat snapshots need ids in [0, n)")
            trees[v] = et
        return cls(trees, g)

    def __len__(self):
        return len(self.trees)

    def __getitem__(self, v: int) -> CTree | None:
        return self.trees[v]

    def get(self, v: int) -> CTree | None:
        return self.trees[v] if 0 <= v < len(self.trees) else None

    def degree(self, v: int) -> int:
        et = self.get(v)
        return 0 if et is None else et.size


def _lookup(g: GraphVersion, snapshot: FlatSnapshot | None) -> Callable[[int], CTree | None]:
    if snapshot is not None:
        return snapshot.get
    return g.edge_tree


def edge_map(g: GraphVersion, U: VertexSubset, F: Callable[[int, int], bool],
             C: Callable[[int], bool] | None = None, snapshot: FlatSnapshot | None = None,
             direction_opt: bool = True, mode: str | None = None) -> VertexSubset:
    """Targets ``v`` of edges ``(u, v)`` with ``u`` in U, ``C(v)`` true and ``F(u, v)`` true.

    ``mode`` forces "sparse" or "dense"; otherwise the dense pull is chosen
    when the frontier's out-edge work exceeds m / DENSE_DIVISOR.
    """
    n = U.n
    if not U:
        return VertexSubset(n)
    lookup = _lookup(g, snapshot)
    if mode is None:
        mode = "sparse"
        if direction_opt and g.is_compact():
            work = len(U)
            for u in U.ids():
                et = lookup(u)
                if et is not None:
                    work += et.size
            if work * DENSE_DIVISOR > g.num_edges:
                mode = "dense"
    if mode == "dense":
        return _dense(n, lookup, U, F, C)
    if mode != "sparse":
        raise ValueError(f"unknown edge_map mode {mode!r}")
    return _sparse(n, lookup, U, F, C)


def _sparse(n, lookup, U, F, C):
    out = []
    seen = set()
    for u in U.ids():
        et = lookup(u)
        if et is None:
            continue
        for v in et.elements():
            if (C is None or C(v)) and F(u, v) and v not in seen:
                seen.add(v)
                out.append(v)
    return VertexSubset(n, ids=out)


def _dense(n, lookup, U, F, C):
    inU = U.flags()
    out = bytearray(n)
    for v in range(n):
        if C is not None and not C(v):
            continue
        et = lookup(v)
        if et is None:
            continue
        for u in et.elements():
            if u < n and inU[u] and F(u, v):
                out[v] = 1
                if C is not None and not C(v):
                    break
    return VertexSubset(n, flags=out)
