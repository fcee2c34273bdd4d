"""Compressed purely-functional integer sets (C-trees).

An element ``e`` is a *head* iff ``hash64(e) % b == 0``.  Heads are the keys
of a persistent weight-balanced tree; each head's value is the chunk of
non-head elements that follow it up to the next head (its tail).  Elements
smaller than every head form the prefix chunk.  Because head selection
depends only on the element, the shape of a C-tree is a pure function of
its element set and ``b``.

Internally the algorithms pass ``(tree, prefix)`` pairs; :class:`CTree`
wraps such a pair together with ``b``.
"""
from __future__ import annotations

from bisect import bisect_left
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from . import chunk as ch
from . import pftree
from .chunk import Chunk
from .errors import ContractViolation
from .hashing import MASK64, SEED, head_mask, is_head

DEFAULT_B = 256

# below this many elements the pure-python builder beats the numpy one
_BULK_THRESHOLD = 512


def _tail_weight(tail):
    return 1 if tail is None else tail.count + 1


heads = pftree.TreeOps(measure=_tail_weight)


class CTree:
    __slots__ = ("tree", "prefix", "b")

    def __init__(self, tree=None, prefix: Chunk | None = None, b: int = DEFAULT_B):
        self.tree = tree
        self.prefix = prefix
        self.b = b

    @property
    def size(self) -> int:
        n = 0 if self.prefix is None else self.prefix.count
        if self.tree is not None:
            n += self.tree.aug
        return n

    def __len__(self):
        return self.size

    def __bool__(self):
        return self.tree is not None or self.prefix is not None

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements())

    def __contains__(self, e) -> bool:
        return find(self, e)

    def __repr__(self):
        return f"CTree(size={self.size}, heads={pftree.size(self.tree)}, b={self.b})"

    def elements(self) -> list[int]:
        out = [] if self.prefix is None else ch.decode(self.prefix)
        if self.tree is not None:
            _collect(self.tree, out)
        return out

    def head_keys(self) -> list[int]:
        return pftree.keys(self.tree)

    # method spellings of the module functions
    def find(self, e):
        return find(self, e)

    def split(self, k):
        return split(self, k)

    def union(self, other):
        return union(self, other)

    def difference(self, other):
        return difference(self, other)

    def intersection(self, other):
        return intersection(self, other)

    def multi_insert(self, xs):
        return multi_insert(self, xs)

    def multi_delete(self, xs):
        return multi_delete(self, xs)


def _collect(t, out):
    decode = ch.decode
    while t is not None:
        if t.left is not None:
            _collect(t.left, out)
        out.append(t.key)
        if t.value is not None:
            out.extend(decode(t.value))
        t = t.right


def empty(b: int = DEFAULT_B) -> CTree:
    return CTree(None, None, b)


# -- building --------------------------------------------------------------

def _check_b(b):
    if not isinstance(b, (int, np.integer)) or b < 1:
        raise ContractViolation(f"chunking parameter b must be an int >= 1, got {b!r}")


def build(xs: Iterable[int], b: int = DEFAULT_B) -> CTree:
    """C-tree over the distinct values of ``xs`` (any order, duplicates allowed)."""
    _check_b(b)
    if isinstance(xs, np.ndarray):
        arr = np.unique(xs.astype(np.int64, copy=False))
        if len(arr) and arr[0] < 0:
            raise ContractViolation("C-tree elements must be non-negative")
        if len(arr) >= _BULK_THRESHOLD:
            return build_many(np.array([0, len(arr)]), arr, b)[0]
        return from_sorted(arr.tolist(), b)
    vals = sorted(set(xs))
    if vals and vals[0] < 0:
        raise ContractViolation("C-tree elements must be non-negative")
    if vals and vals[-1] >= ch.MAX_ELEMENT:
        raise ContractViolation("C-tree elements must be < 2**63")
    if len(vals) >= _BULK_THRESHOLD:
        return build_many(np.array([0, len(vals)]), np.array(vals, dtype=np.int64), b)[0]
    return from_sorted(vals, b)


def from_sorted(xs: Sequence[int], b: int = DEFAULT_B) -> CTree:
    """Build from a strictly increasing list of non-negative ints (unchecked)."""
    tree, prefix = _pairs_from_sorted(xs, b)
    return CTree(tree, prefix, b)


def _pairs_from_sorted(xs, b):
    if not xs:
        return None, None
    if b == 1:
        return heads.build_sorted(xs, [None] * len(xs)), None
    hk: list[int] = []
    hv: list = []
    prefix = None
    start = 0
    seed = SEED
    m1 = 0xBF58476D1CE4E5B9
    m2 = 0x94D049BB133111EB
    mask = MASK64
    from_sorted_chunk = ch.from_sorted
    for i, x in enumerate(xs):
        # inlined hash64
        z = (x ^ seed) & mask
        z = ((z ^ (z >> 30)) * m1) & mask
        z = ((z ^ (z >> 27)) * m2) & mask
        if (z ^ (z >> 31)) % b == 0:
            if hk:
                hv.append(from_sorted_chunk(xs[start:i]))
            else:
                prefix = from_sorted_chunk(xs[start:i])
            hk.append(x)
            start = i + 1
    if hk:
        hv.append(from_sorted_chunk(xs[start:]))
    else:
        prefix = from_sorted_chunk(xs)
    return heads.build_sorted(hk, hv), prefix


def build_many(offsets: np.ndarray, values: np.ndarray, b: int = DEFAULT_B) -> list[CTree]:
    """Build one C-tree per segment ``values[offsets[i]:offsets[i+1]]``.

    Each segment must already be strictly increasing.  Head selection and
    gap encoding are vectorised across all segments; only node and chunk
    construction loop in Python.
    """
    _check_b(b)
    offsets = np.asarray(offsets, dtype=np.int64)
    values = np.asarray(values, dtype=np.int64)
    nseg = len(offsets) - 1
    n = len(values)
    if n == 0:
        return [CTree(None, None, b) for _ in range(nseg)]
    is_head = head_mask(values, b)
    seg_start = np.zeros(n, dtype=bool)
    starts = offsets[:-1][offsets[:-1] < offsets[1:]]
    seg_start[starts] = True
    prev_head = np.empty(n, dtype=bool)
    prev_head[0] = False
    prev_head[1:] = is_head[:-1]
    interior = ~is_head & ~seg_start & ~prev_head
    pos = np.flatnonzero(interior)
    gaps = values[pos] - values[pos - 1]
    buf, ends = ch.encode_gaps_array(gaps)
    nb = np.zeros(n, dtype=np.int64)
    if len(pos):
        nb[pos] = np.diff(ends, prepend=0)
    cum = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(nb, out=cum[1:])

    vals = values.tolist()
    cum_l = cum.tolist()
    data = buf.tobytes()
    head_pos = np.flatnonzero(is_head)
    seg_heads = np.searchsorted(head_pos, offsets).tolist()
    head_pos_l = head_pos.tolist()
    off_l = offsets.tolist()

    def run(x, y):
        if x >= y:
            return None
        # gaps for positions x+1 .. y-1
        return Chunk(y - x, vals[x], vals[y - 1], data[cum_l[x + 1]:cum_l[y]])

    out = []
    build_sorted = heads.build_sorted
    for s in range(nseg):
        lo, hi = off_l[s], off_l[s + 1]
        h0, h1 = seg_heads[s], seg_heads[s + 1]
        if h0 == h1:
            out.append(CTree(None, run(lo, hi), b))
            continue
        hp = head_pos_l[h0:h1]
        prefix = run(lo, hp[0])
        hk = [vals[p] for p in hp]
        hv = [run(p + 1, q) for p, q in zip(hp, hp[1:] + [hi])]
        out.append(CTree(build_sorted(hk, hv), prefix, b))
    return out


# -- queries ---------------------------------------------------------------

def size(t: CTree) -> int:
    return t.size


def find(t: CTree, e: int) -> bool:
    return _find(t.tree, t.prefix, e)


def _find(T, P, e):
    if P is not None and e <= P.last:
        return P.contains(e)
    r = pftree.find_le(T, e)
    if r is None:
        return False
    h, tail, _ = r
    return h == e or (tail is not None and tail.contains(e))


def map(t: CTree, f: Callable[[int], object]) -> None:
    """Apply ``f`` to every element in ascending order."""
    if t.prefix is not None:
        for x in ch.decode(t.prefix):
            f(x)
    for h, tail in pftree.items(t.tree):
        f(h)
        if tail is not None:
            for x in ch.decode(tail):
                f(x)


def structure(t: CTree):
    """Canonical shape: ``(prefix elements, [(head, tail elements), ...])``."""
    return (ch.elements(t.prefix),
            [(h, ch.elements(v)) for h, v in pftree.items(t.tree)])


def audit(t: CTree) -> None:
    """Check every structural invariant; raise AssertionError on the first failure."""
    b = t.b
    prev = -1
    total = 0
    if t.prefix is not None:
        xs = ch.decode(t.prefix)
        for x in xs:
            if is_head(x, b):
                raise AssertionError(f"prefix element {x} is a head")
        if xs[0] <= prev:
            raise AssertionError("prefix out of order")
        prev = xs[-1]
        total += len(xs)
    for h, tail in pftree.items(t.tree):
        if not is_head(h, b):
            raise AssertionError(f"tree key {h} is not a head")
        if h <= prev:
            raise AssertionError(f"head {h} not above preceding elements")
        prev = h
        total += 1
        if tail is not None:
            xs = ch.decode(tail)
            if tail.count != len(xs) or tail.count < 1:
                raise AssertionError("bad tail count")
            for x in xs:
                if is_head(x, b):
                    raise AssertionError(f"tail element {x} is a head")
            if xs[0] <= prev:
                raise AssertionError(f"tail of {h} out of order")
            prev = xs[-1]
            total += len(xs)
    pftree.check_balance(t.tree)
    heads.check_aug(t.tree)
    if total != t.size:
        raise AssertionError(f"cached size {t.size} != element count {total}")


# -- split -----------------------------------------------------------------

def split(t: CTree, k: int):
    """``(left, found, right)``: elements < k, membership of k, elements > k."""
    lt, lp, found, rt, rp = _split(t.tree, t.prefix, k)
    return CTree(lt, lp, t.b), found, CTree(rt, rp, t.b)


def _split(T, P, k):
    if P is not None:
        if k <= P.last:
            pl, found, pr = ch.split_chunk(P, k)
            return None, pl, found, T, pr
        lt, found, rt, rp = _split_tree(T, k)
        return lt, P, found, rt, rp
    lt, found, rt, rp = _split_tree(T, k)
    return lt, None, found, rt, rp


def _split_tree(T, k):
    """Split a prefix-less tree: ``(left tree, found, right tree, right prefix)``."""
    if T is None:
        return None, False, None, None
    h = T.key
    if k == h:
        return T.left, True, T.right, T.value
    if k < h:
        ll, found, ltr, lpr = _split_tree(T.left, k)
        right = T if ltr is T.left else heads.join(ltr, h, T.value, T.right)
        return ll, found, right, lpr
    v = T.value
    if v is not None and k <= v.last:
        vl, found, vr = ch.split_chunk(v, k)
        return heads.join(T.left, h, vl, None), found, T.right, vr
    rtl, found, rt, rp = _split_tree(T.right, k)
    left = T if rtl is T.right else heads.join(T.left, h, v, rtl)
    return left, found, rt, rp


# -- union -------------------------------------------------------------------

def _same_b(a: CTree, c: CTree):
    if a.b != c.b:
        raise ContractViolation(f"C-trees built with different b ({a.b} vs {c.b})")


def union(a: CTree, c: CTree) -> CTree:
    _same_b(a, c)
    t, p = _union(a.tree, a.prefix, c.tree, c.prefix)
    return CTree(t, p, a.b)


def _union(T1, P1, T2, P2):
    if T1 is None:
        return _union_bc(P1, T2, P2)
    if T2 is None:
        return _union_bc(P2, T1, P1)
    l2, k2, v2, r2 = T2.left, T2.key, T2.value, T2.right
    b1t, b1p, _, bt2, bp2 = _split(T1, P1, k2)
    # tail of k2 may extend past the smallest head of the right split
    vl, vr = ch.split_chunk_below(v2, pftree.first_key(bt2) if bt2 is not None else None)
    # and the right split's prefix may extend past the smallest head of r2
    pl, pr = ch.split_chunk_below(bp2, pftree.first_key(r2) if r2 is not None else None)
    v2n = ch.union_chunk(vl, pl)
    clt, clp = _union(b1t, b1p, l2, P2)
    crt, _ = _union(bt2, pr, r2, vr)
    return heads.join(clt, k2, v2n, crt), clp


def union_bc(p: CTree, c: CTree) -> CTree:
    """Union of a prefix-only C-tree ``p`` with ``c``."""
    _same_b(p, c)
    if p.tree is not None:
        raise ContractViolation("union_bc: first argument must have an empty tree")
    t, pre = _union_bc(p.prefix, c.tree, c.prefix)
    return CTree(t, pre, c.b)


def _union_bc(P1, T2, P2):
    if P1 is None:
        return T2, P2
    if T2 is None:
        return None, ch.union_chunk(P1, P2)
    pl, pr = ch.split_chunk_below(P1, pftree.first_key(T2))
    if pr is not None:
        ks, vs = _route_to_tails(T2, ch.decode(pr), ch.union_with_list)
        T2 = heads.multi_insert_sorted(T2, ks, vs)
    return T2, ch.union_chunk(pl, P2)


def _route_to_tails(T, xs, merge):
    """Group sorted non-head ``xs`` (all >= smallest head) by owning head.

    Returns parallel lists ``(heads, merge(old_tail, group))``.
    """
    ks = []
    vs = []
    i = 0
    n = len(xs)
    while i < n:
        h, tail, nxt = pftree.find_le(T, xs[i])
        j = n if nxt is None else bisect_left(xs, nxt, i + 1)
        ks.append(h)
        vs.append(merge(tail, xs[i:j]))
        i = j
    return ks, vs


# -- difference / intersection ---------------------------------------------

def _join2(lt, lp, rt, rp):
    """Concatenate two C-trees whose elements are ordered left < right."""
    if rp is None:
        return heads.join2(lt, rt), lp
    if lt is None:
        return rt, ch.concat_chunks(lp, rp)
    rest, k, v = heads.split_last(lt)
    return heads.join(rest, k, ch.concat_chunks(v, rp), rt), lp


def join2(a: CTree, c: CTree) -> CTree:
    _same_b(a, c)
    if a and c and _max(a) >= _min(c):
        raise ContractViolation("join2: C-trees overlap")
    t, p = _join2(a.tree, a.prefix, c.tree, c.prefix)
    return CTree(t, p, a.b)


def _min(t: CTree):
    if t.prefix is not None:
        return t.prefix.first
    return pftree.first_key(t.tree)


def _max(t: CTree):
    if t.tree is None:
        return t.prefix.last
    h, tail = pftree.last(t.tree)
    return h if tail is None else tail.last


def _members(xs, T, P) -> set:
    """Subset of sorted non-head ``xs`` present in the C-tree ``(T, P)``."""
    hit = set()
    if not xs:
        return hit
    s = pftree.first_key(T) if T is not None else None
    cut = len(xs) if s is None else bisect_left(xs, s)
    if cut and P is not None:
        hit.update(set(ch.decode(P)).intersection(xs[:cut]))
    i = cut
    n = len(xs)
    while i < n:
        h, tail, nxt = pftree.find_le(T, xs[i])
        j = n if nxt is None else bisect_left(xs, nxt, i + 1)
        if tail is not None:
            hit.update(set(ch.decode(tail)).intersection(xs[i:j]))
        i = j
    return hit


def difference(a: CTree, c: CTree) -> CTree:
    _same_b(a, c)
    t, p = _difference(a.tree, a.prefix, c.tree, c.prefix)
    return CTree(t, p, a.b)


def _difference(T1, P1, T2, P2):
    if T1 is None and P1 is None:
        return None, None
    if T2 is None:
        if P2 is None:
            return T1, P1
        return _remove_non_heads(T1, P1, ch.decode(P2))
    if T1 is None:
        xs = ch.decode(P1)
        hit = _members(xs, T2, P2)
        if not hit:
            return None, P1
        return None, ch.from_sorted([x for x in xs if x not in hit])
    l2, k2, v2, r2 = T2.left, T2.key, T2.value, T2.right
    b1t, b1p, _, b2t, b2p = _split(T1, P1, k2)
    lt, lp = _difference(b1t, b1p, l2, P2)
    rt, rp = _difference(b2t, b2p, r2, v2)
    return _join2(lt, lp, rt, rp)


def _remove_non_heads(T, P, xs):
    """Delete sorted non-head elements ``xs`` from ``(T, P)``."""
    s = pftree.first_key(T) if T is not None else None
    cut = len(xs) if s is None else bisect_left(xs, s)
    if cut:
        P = ch.difference_with_list(P, xs[:cut])
    if cut < len(xs):
        ks, vs = _route_to_tails(T, xs[cut:], ch.difference_with_list)
        T = heads.multi_update(T, ks, vs, _replace)
    return T, P


def _replace(old, new):
    return new


def intersection(a: CTree, c: CTree) -> CTree:
    _same_b(a, c)
    t, p = _intersection(a.tree, a.prefix, c.tree, c.prefix)
    return CTree(t, p, a.b)


def _intersection(T1, P1, T2, P2):
    if (T1 is None and P1 is None) or (T2 is None and P2 is None):
        return None, None
    if T1 is None:
        xs = ch.decode(P1)
        hit = _members(xs, T2, P2)
        return None, ch.from_sorted([x for x in xs if x in hit])
    if T2 is None:
        xs = ch.decode(P2)
        hit = _members(xs, T1, P1)
        return None, ch.from_sorted([x for x in xs if x in hit])
    l2, k2, v2, r2 = T2.left, T2.key, T2.value, T2.right
    b1t, b1p, found, b2t, b2p = _split(T1, P1, k2)
    lt, lp = _intersection(b1t, b1p, l2, P2)
    rt, rp = _intersection(b2t, b2p, r2, v2)
    if found:
        return heads.join(lt, k2, rp, rt), lp
    return _join2(lt, lp, rt, rp)


# -- batch updates -----------------------------------------------------------

def multi_insert(t: CTree, xs: Iterable[int]) -> CTree:
    batch = build(xs, t.b)
    if not batch:
        return t
    return union(t, batch)


def multi_delete(t: CTree, xs: Iterable[int]) -> CTree:
    batch = build(xs, t.b)
    if not batch:
        return t
    return difference(t, batch)
