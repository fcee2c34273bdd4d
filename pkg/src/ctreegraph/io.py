"""AdjacencyGraph files and +/- update streams."""
from __future__ import annotations

import os
from typing import Iterator

import numpy as np

from .ctree import DEFAULT_B
from .errors import ParseError
from .graph import GraphVersion, from_edge_arrays

HEADER = "AdjacencyGraph"


def _ints(lines: list[str], first_line: int, path) -> np.ndarray:
    """Parse one decimal int per line; ``first_line`` is the 1-based number of lines[0]."""
    try:
        return np.array([int(s) for s in lines], dtype=np.int64)
    except (ValueError, OverflowError):
        for i, s in enumerate(lines):
            try:
                int(s)
            except ValueError:
                raise ParseError(f"expected an integer, got {s.strip()!r}", first_line + i, path) from None
        raise ParseError("integer out of range", first_line, path) from None


def read_adjacency_arrays(path) -> tuple[int, np.ndarray, np.ndarray]:
    """Parse an AdjacencyGraph file into ``(n, offsets[n+1], targets[m])``."""
    with open(path) as fh:
        lines = fh.read().split("\n")
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines or lines[0].strip() != HEADER:
        raise ParseError(f"first line must be {HEADER!r}", 1, path)
    if len(lines) < 3:
        raise ParseError("missing vertex or edge count", len(lines) + 1, path)
    n, m = (int(x) for x in _ints(lines[1:3], 2, path))
    if n < 0 or m < 0:
        raise ParseError("negative vertex or edge count", 2 if n < 0 else 3, path)
    expected = 3 + n + m
    if len(lines) != expected:
        raise ParseError(f"header says n={n}, m={m} so {expected} lines are expected, found {len(lines)}",
                         min(len(lines), expected) + 1 if len(lines) < expected else expected + 1, path)
    offsets = _ints(lines[3:3 + n], 4, path)
    targets = _ints(lines[3 + n:], 4 + n, path)
    if n:
        bad = np.flatnonzero((offsets < 0) | (offsets > m))
        if len(bad):
            i = int(bad[0])
            raise ParseError(f"offset {offsets[i]} outside [0, {m}]", 4 + i, path)
        if offsets[0] != 0:
            raise ParseError("first offset must be 0", 4, path)
        dec = np.flatnonzero(np.diff(offsets) < 0)
        if len(dec):
            i = int(dec[0]) + 1
            raise ParseError("offsets must be nondecreasing", 4 + i, path)
    elif m:
        raise ParseError(f"graph with no vertices cannot have m={m}", 3, path)
    if m:
        bad = np.flatnonzero((targets < 0) | (targets >= n))
        if len(bad):
            i = int(bad[0])
            raise ParseError(f"neighbour id {targets[i]} outside [0, {n})", 4 + n + i, path)
    return n, np.r_[offsets, m].astype(np.int64), targets


def csr_to_edges(offsets: np.ndarray, targets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = len(offsets) - 1
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(offsets))
    return src, np.asarray(targets, dtype=np.int64)


def symmetrize(src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Both directions of every edge, self-loops dropped (duplicates left to the builder)."""
    keep = src != dst
    src, dst = src[keep], dst[keep]
    return np.concatenate([src, dst]), np.concatenate([dst, src])


def parse_adjacency_graph(path, b: int = DEFAULT_B, symmetrize_edges: bool = False) -> GraphVersion:
    n, offsets, targets = read_adjacency_arrays(path)
    src, dst = csr_to_edges(offsets, targets)
    if symmetrize_edges:
        src, dst = symmetrize(src, dst)
    return from_edge_arrays(n, src, dst, b)


def write_adjacency_arrays(path, n: int, src: np.ndarray, dst: np.ndarray) -> None:
    """Write edges (grouped by ascending source) in AdjacencyGraph format."""
    src = np.asarray(src, dtype=np.int64)
    order = np.argsort(src, kind="stable")
    src = src[order]
    dst = np.asarray(dst, dtype=np.int64)[order]
    offsets = np.searchsorted(src, np.arange(n, dtype=np.int64))
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(f"{HEADER}\n{n}\n{len(dst)}\n")
        if n:
            fh.write("\n".join(map(str, offsets.tolist())) + "\n")
        if len(dst):
            fh.write("\n".join(map(str, dst.tolist())) + "\n")
    os.replace(tmp, path)


def write_adjacency_graph(path, g: GraphVersion) -> None:
    if not g.is_compact():
        raise ValueError("AdjacencyGraph output needs vertex ids 0..n-1")
    src, dst = g.edge_arrays()
    write_adjacency_arrays(path, g.num_vertices, src, dst)


def iter_updates(path) -> Iterator[tuple[int, int, int, int]]:
    """Yield ``(line_no, sign, u, v)`` with sign +1 for insert and -1 for delete."""
    with open(path) as fh:
        for no, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) != 3 or parts[0] not in ("+", "-"):
                raise ParseError(f"expected '+ u v' or '- u v', got {s!r}", no, path)
            try:
                u = int(parts[1])
                v = int(parts[2])
            except ValueError:
                raise ParseError(f"vertex ids must be decimal integers, got {s!r}", no, path) from None
            if u < 0 or v < 0:
                raise ParseError("vertex ids must be non-negative", no, path)
            yield no, (1 if parts[0] == "+" else -1), u, v


def read_updates(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All updates as parallel ``(sign, u, v)`` int64 arrays."""
    rows = [(s, u, v) for _, s, u, v in iter_updates(path)]
    if not rows:
        z = np.zeros(0, dtype=np.int64)
        return z, z.copy(), z.copy()
    arr = np.array(rows, dtype=np.int64)
    return arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy()


def write_updates(path, signs, us, vs) -> None:
    with open(path, "w") as fh:
        for s, u, v in zip(np.asarray(signs).tolist(), np.asarray(us).tolist(), np.asarray(vs).tolist()):
            fh.write(f"{'+' if s > 0 else '-'} {u} {v}\n")
