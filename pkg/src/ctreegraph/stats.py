"""Memory accounting for three edge representations.

Node sizes model a native 64-bit layout rather than CPython objects:

* uncompressed: one 32-byte tree node per edge, 48-byte vertex nodes;
* C-tree: 48-byte head nodes, 56-byte vertex nodes, chunks stored either
  as an 8-byte count plus 8 bytes per element, or difference encoded in
  the packed varint layout of :meth:`Chunk.nbytes`.

Tails are encoded relative to their head key, the prefix relative to 0.
"""
from __future__ import annotations

from . import pftree
from .graph import GraphVersion, rebuild

UNCOMPRESSED_VERTEX_NODE = 48
UNCOMPRESSED_EDGE_NODE = 32
COMPRESSED_VERTEX_NODE = 56
HEAD_NODE = 48
WORD = 8

MODES = ("uncompressed", "ctree", "ctree_de")


def _plain_chunk(c) -> int:
    return WORD + WORD * c.count


def memory_report(g: GraphVersion, b: int | None = None) -> dict:
    if b is not None and b != g.b:
        g = rebuild(g, b)
    n, m = g.counts()
    heads = chunks = plain = packed = 0
    for _, et in pftree.items(g.vertex_tree):
        p = et.prefix
        if p is not None:
            chunks += 1
            plain += _plain_chunk(p)
            packed += p.nbytes(0)
        for h, tail in pftree.items(et.tree):
            heads += 1
            if tail is not None:
                chunks += 1
                plain += _plain_chunk(tail)
                packed += tail.nbytes(h)
    edge_bytes = {
        "uncompressed": UNCOMPRESSED_EDGE_NODE * m,
        "ctree": HEAD_NODE * heads + plain,
        "ctree_de": HEAD_NODE * heads + packed,
    }
    vertex_bytes = {
        "uncompressed": UNCOMPRESSED_VERTEX_NODE * n,
        "ctree": COMPRESSED_VERTEX_NODE * n,
        "ctree_de": COMPRESSED_VERTEX_NODE * n,
    }
    modes = {}
    for k in MODES:
        total = edge_bytes[k] + vertex_bytes[k]
        modes[k] = {
            "vertex_bytes": vertex_bytes[k],
            "edge_bytes": edge_bytes[k],
            "total_bytes": total,
            "bytes_per_edge": total / m if m else 0.0,
        }
    base = modes["uncompressed"]["total_bytes"]
    return {
        "n": n,
        "m": m,
        "b": g.b,
        "heads": heads,
        "chunks": chunks,
        "modes": modes,
        "savings": base / modes["ctree_de"]["total_bytes"] if m else 1.0,
        "savings_no_de": base / modes["ctree"]["total_bytes"] if m else 1.0,
        "de_gain": modes["ctree"]["total_bytes"] / modes["ctree_de"]["total_bytes"] if m else 1.0,
    }


def format_report(r: dict) -> str:
    lines = [f"n={r['n']} m={r['m']} b={r['b']} heads={r['heads']} chunks={r['chunks']}"]
    for k in MODES:
        d = r["modes"][k]
        lines.append(f"{k:>13}: {d['total_bytes']:>14,} bytes  {d['bytes_per_edge']:8.2f} B/edge")
    lines.append(f"savings (uncompressed / ctree_de): {r['savings']:.2f}x")
    lines.append(f"difference encoding gain:          {r['de_gain']:.2f}x")
    return "\n".join(lines)
