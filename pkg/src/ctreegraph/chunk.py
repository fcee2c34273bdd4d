"""Difference-encoded runs of strictly increasing non-negative integers.

A chunk keeps ``count``, ``first`` and ``last`` unpacked next to a payload
holding the gaps ``xs[i] - xs[i-1]`` (i >= 1) as little-endian base-128
varints: 7 data bits per byte, low group first, high bit = more bytes follow.

Empty runs are represented by ``None``, never by a zero-count chunk; the
set operations below accept and return ``None`` accordingly.
"""
from __future__ import annotations

import re
from bisect import bisect_left
from itertools import accumulate
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractViolation, CorruptChunk

MAX_ELEMENT = 1 << 63


def encode_varint(x: int) -> bytes:
    out = bytearray()
    while x >= 0x80:
        out.append((x & 0x7F) | 0x80)
        x >>= 7
    out.append(x)
    return bytes(out)


def decode_varint(buf: bytes, pos: int = 0) -> tuple[int, int]:
    """Decode one varint at ``pos``; return ``(value, next_pos)``."""
    x = 0
    shift = 0
    n = len(buf)
    while True:
        if pos >= n:
            raise CorruptChunk("truncated varint")
        byte = buf[pos]
        pos += 1
        x |= (byte & 0x7F) << shift
        if byte < 0x80:
            return x, pos
        shift += 7


def varint_len(x: int) -> int:
    return max(1, (x.bit_length() + 6) // 7)


# one- and two-byte codes are looked up rather than computed
_TABLE_LIMIT = 1 << 14
_ENC = [encode_varint(i) for i in range(_TABLE_LIMIT)]
_DEC = {code: i for i, code in enumerate(_ENC) if i}
_TOKEN = re.compile(rb"[\x80-\xff]*[\x00-\x7f]", re.S)


def _encode_gaps(xs: Sequence[int]) -> bytes:
    gaps = [b - a for a, b in zip(xs, xs[1:])]
    if not gaps:
        return b""
    top = max(gaps)
    if top < 0x80:
        return bytes(gaps)
    if top < _TABLE_LIMIT:
        enc = _ENC
        return b"".join([enc[g] for g in gaps])
    out = bytearray()
    for g in gaps:
        while g >= 0x80:
            out.append((g & 0x7F) | 0x80)
            g >>= 7
        out.append(g)
    return bytes(out)


class Chunk:
    __slots__ = ("count", "first", "last", "payload")

    def __init__(self, count: int, first: int, last: int, payload: bytes):
        self.count = count
        self.first = first
        self.last = last
        self.payload = payload

    def __len__(self):
        return self.count

    def __iter__(self):
        return iter(decode(self))

    def __eq__(self, other):
        if not isinstance(other, Chunk):
            return NotImplemented
        return (self.count == other.count and self.first == other.first
                and self.last == other.last and self.payload == other.payload)

    __hash__ = None

    def __repr__(self):
        return f"Chunk(count={self.count}, first={self.first}, last={self.last}, payload={len(self.payload)}B)"

    def elements(self) -> list[int]:
        return decode(self)

    def contains(self, k: int) -> bool:
        if k < self.first or k > self.last:
            return False
        if k == self.first or k == self.last:
            return True
        xs = decode(self)
        i = bisect_left(xs, k)
        return i < len(xs) and xs[i] == k

    def to_bytes(self, base: int = 0) -> bytes:
        """Packed layout: varint count, varint first-base, varint last-base, payload."""
        return (encode_varint(self.count) + encode_varint(self.first - base)
                + encode_varint(self.last - base) + self.payload)

    def nbytes(self, base: int = 0) -> int:
        return (varint_len(self.count) + varint_len(self.first - base)
                + varint_len(self.last - base) + len(self.payload))

    @classmethod
    def from_bytes(cls, buf: bytes, base: int = 0) -> "Chunk":
        count, pos = decode_varint(buf, 0)
        first, pos = decode_varint(buf, pos)
        last, pos = decode_varint(buf, pos)
        if count < 1:
            raise CorruptChunk("chunk count must be >= 1")
        c = cls(count, first + base, last + base, bytes(buf[pos:]))
        decode(c)
        return c


def encode(xs: Sequence[int]) -> Chunk:
    """Encode a non-empty strictly increasing sequence of ints in [0, 2**63)."""
    xs = list(xs)
    if not xs:
        raise ContractViolation("cannot encode an empty run")
    if xs[0] < 0 or xs[-1] >= MAX_ELEMENT:
        raise ContractViolation("chunk elements must lie in [0, 2**63)")
    for i in range(1, len(xs)):
        if xs[i] <= xs[i - 1]:
            raise ContractViolation(f"chunk input not strictly increasing at index {i}")
    return from_sorted(xs)


def from_sorted(xs: Sequence[int]) -> Chunk | None:
    """Encode without validation; ``None`` for an empty run."""
    if not xs:
        return None
    return Chunk(len(xs), xs[0], xs[-1], _encode_gaps(xs))


def decode(c: Chunk) -> list[int]:
    payload = c.payload
    count = c.count
    if len(payload) == count - 1 and (count == 1 or max(payload) < 0x80):
        if 0 in payload:
            raise CorruptChunk("zero gap in chunk payload")
        out = list(accumulate(payload, initial=c.first))
    else:
        if not payload:
            raise CorruptChunk(f"empty payload, header says count={count}")
        if payload[-1] >= 0x80:
            raise CorruptChunk("truncated varint at end of payload")
        if len(payload) <= 2 * (count - 1):
            get = _DEC.get
            gaps = [get(tok) or _decode_token(tok) for tok in _TOKEN.findall(payload)]
        else:
            gaps = _decode_gaps_loop(payload)
        if len(gaps) != count - 1:
            raise CorruptChunk(f"payload decodes to {len(gaps) + 1} elements, header says {count}")
        out = list(accumulate(gaps, initial=c.first))
    if out[-1] != c.last:
        raise CorruptChunk(f"payload ends at {out[-1]}, header says last={c.last}")
    return out


def _decode_gaps_loop(payload: bytes) -> list[int]:
    gaps = []
    acc = 0
    shift = 0
    for byte in payload:
        acc |= (byte & 0x7F) << shift
        if byte & 0x80:
            shift += 7
        else:
            if acc == 0:
                raise CorruptChunk("zero gap in chunk payload")
            gaps.append(acc)
            acc = 0
            shift = 0
    return gaps


def _decode_token(tok: bytes) -> int:
    """Decode one varint token that is not in the lookup table (long, zero or non-canonical)."""
    acc = 0
    for shift, byte in enumerate(tok):
        acc |= (byte & 0x7F) << (7 * shift)
    if acc == 0:
        raise CorruptChunk("zero gap in chunk payload")
    return acc


def elements(c: Chunk | None) -> list[int]:
    return [] if c is None else decode(c)


def _single_byte(c: Chunk) -> bool:
    return len(c.payload) == c.count - 1


def split_chunk(c: Chunk | None, k: int):
    """``(left, found, right)`` with left < k < right; empty sides are None."""
    if c is None:
        return None, False, None
    if k < c.first:
        return None, False, c
    if k > c.last:
        return c, False, None
    xs = decode(c)
    n = len(xs)
    i = bisect_left(xs, k)
    found = i < n and xs[i] == k
    j = i + 1 if found else i
    if _single_byte(c):
        # every gap is one byte, so gap i lives at payload[i-1]
        left = Chunk(i, xs[0], xs[i - 1], c.payload[:i - 1]) if i else None
        right = Chunk(n - j, xs[j], xs[-1], c.payload[j:]) if j < n else None
    else:
        left = from_sorted(xs[:i])
        right = from_sorted(xs[j:])
    return left, found, right


def split_chunk_below(c: Chunk | None, k):
    """Split by a key that is known not to be an element (``k`` may be None = +inf)."""
    if c is None or k is None or k > c.last:
        return c, None
    if k <= c.first:
        return None, c
    left, _, right = split_chunk(c, k)
    return left, right


def union_chunk(a: Chunk | None, b: Chunk | None) -> Chunk | None:
    if a is None:
        return b
    if b is None:
        return a
    if a.last < b.first:
        return concat_chunks(a, b)
    if b.last < a.first:
        return concat_chunks(b, a)
    return from_sorted(sorted(set(decode(a)).union(decode(b))))


def union_with_list(a: Chunk | None, xs: Sequence[int]) -> Chunk | None:
    """Union of a chunk with a sorted duplicate-free list."""
    if not xs:
        return a
    if a is None:
        return from_sorted(xs)
    return from_sorted(sorted(set(decode(a)).union(xs)))


def difference_chunk(a: Chunk | None, b: Chunk | None) -> Chunk | None:
    if a is None or b is None or a.last < b.first or b.last < a.first:
        return a
    return difference_with_list(a, decode(b))


def difference_with_list(a: Chunk | None, xs: Iterable[int]) -> Chunk | None:
    if a is None:
        return None
    drop = set(xs)
    ys = decode(a)
    kept = [x for x in ys if x not in drop]
    if len(kept) == len(ys):
        return a
    return from_sorted(kept)


def intersection_chunk(a: Chunk | None, b: Chunk | None) -> Chunk | None:
    if a is None or b is None or a.last < b.first or b.last < a.first:
        return None
    keep = set(decode(b))
    return from_sorted([x for x in decode(a) if x in keep])


def concat_chunks(a: Chunk | None, b: Chunk | None) -> Chunk | None:
    """Append ``b`` after ``a``; requires ``a.last < b.first``."""
    if a is None:
        return b
    if b is None:
        return a
    return Chunk(a.count + b.count, a.first, b.last,
                 a.payload + encode_varint(b.first - a.last) + b.payload)


# -- bulk encoding -----------------------------------------------------------

def encode_gaps_array(gaps: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Varint-encode many gaps at once.

    Returns ``(buf, ends)`` where ``buf`` is the concatenated uint8 encoding
    and ``ends[i]`` is the byte offset just past gap ``i``.
    """
    g = np.asarray(gaps, dtype=np.uint64)
    nb = np.ones(g.shape, dtype=np.int64)
    for i in range(1, 10):
        nb += g >= np.uint64(1 << (7 * i))
    ends = np.cumsum(nb)
    total = int(ends[-1]) if len(ends) else 0
    buf = np.empty(total, dtype=np.uint8)
    starts = ends - nb
    maxlen = int(nb.max()) if len(nb) else 0
    for j in range(maxlen):
        sel = nb > j
        part = (g[sel] >> np.uint64(7 * j)) & np.uint64(0x7F)
        more = (nb[sel] > j + 1).astype(np.uint64) << np.uint64(7)
        buf[starts[sel] + j] = (part | more).astype(np.uint8)
    return buf, ends
