"""Persistent join-based weight-balanced trees.

Every operation returns a new tree and leaves its inputs untouched; only
the nodes on modified paths are copied.  All balancing goes through
:meth:`TreeOps.join`, so split/union/difference/multi_insert inherit their
balance guarantees from it.

Trees are plain :class:`Node` objects (``None`` is the empty tree).  A
:class:`TreeOps` instance fixes the augmentation carried by the nodes it
creates, so the head tree of a C-tree and a graph's vertex tree are two
``TreeOps`` over the same node type.

Memory reclamation is CPython reference counting: a node is freed when the
last parent or external handle drops it.  ``live_nodes()`` exposes an
allocation counter that tests use to audit that.
"""
from __future__ import annotations

import itertools
from bisect import bisect_left
from typing import Any, Callable, Iterator, Sequence

from .errors import ContractViolation

# balance parameter alpha = 29/100; valid for single/double rotations while
# alpha <= 1 - 1/sqrt(2)
ALPHA_NUM = 29
ALPHA_DEN = 100

_allocated = itertools.count()
_freed = itertools.count()


def _counter_value(counter: itertools.count) -> int:
    # itertools.count has no read accessor; next() would consume a value
    return int(repr(counter)[6:-1])


def live_nodes() -> int:
    """Number of tree nodes currently alive in this process."""
    return _counter_value(_allocated) - _counter_value(_freed)


class Node:
    __slots__ = ("left", "key", "value", "right", "size", "aug")

    def __init__(self, left, key, value, right, size, aug):
        self.left = left
        self.key = key
        self.value = value
        self.right = right
        self.size = size
        self.aug = aug
        next(_allocated)

    def __del__(self):
        next(_freed)

    def __repr__(self):
        return f"Node(key={self.key!r}, size={self.size})"


REMOVE = object()
"""Returned by an update function to drop the key from the tree."""


def size(t: Node | None) -> int:
    return 0 if t is None else t.size


def _like(wl: int, wr: int) -> bool:
    # wl, wr are weights (size + 1)
    s = ALPHA_NUM * (wl + wr)
    return s <= ALPHA_DEN * wl and s <= ALPHA_DEN * wr


def expose(t: Node):
    if t is None:
        raise ContractViolation("expose on an empty tree")
    return t.left, t.key, t.value, t.right


def first(t: Node | None):
    """(key, value) of the smallest entry, or None."""
    if t is None:
        return None
    while t.left is not None:
        t = t.left
    return t.key, t.value


def last(t: Node | None):
    if t is None:
        return None
    while t.right is not None:
        t = t.right
    return t.key, t.value


def first_key(t: Node | None):
    while t.left is not None:
        t = t.left
    return t.key


def find(t: Node | None, key, default=None):
    while t is not None:
        k = t.key
        if key < k:
            t = t.left
        elif k < key:
            t = t.right
        else:
            return t.value
    return default


def contains(t: Node | None, key) -> bool:
    while t is not None:
        k = t.key
        if key < k:
            t = t.left
        elif k < key:
            t = t.right
        else:
            return True
    return False


def find_le(t: Node | None, key):
    """Largest entry with key <= ``key`` plus the next key above it.

    Returns ``(k, value, next_key)`` with ``next_key`` None when ``k`` is the
    maximum; returns None when every key exceeds ``key``.
    """
    best = None
    nxt = None
    while t is not None:
        k = t.key
        if k <= key:
            best = t
            t = t.right
        else:
            nxt = k
            t = t.left
    if best is None:
        return None
    return best.key, best.value, nxt


def items(t: Node | None) -> Iterator[tuple[Any, Any]]:
    stack = []
    while stack or t is not None:
        while t is not None:
            stack.append(t)
            t = t.left
        t = stack.pop()
        yield t.key, t.value
        t = t.right


def keys(t: Node | None) -> list:
    out: list = []
    _collect_keys(t, out)
    return out


def _collect_keys(t, out):
    while t is not None:
        _collect_keys(t.left, out)
        out.append(t.key)
        t = t.right


def to_list(t: Node | None) -> list[tuple[Any, Any]]:
    out: list = []
    _collect_items(t, out)
    return out


def _collect_items(t, out):
    while t is not None:
        _collect_items(t.left, out)
        out.append((t.key, t.value))
        t = t.right


def height(t: Node | None) -> int:
    if t is None:
        return 0
    return 1 + max(height(t.left), height(t.right))


def count_nodes(roots, seen: set | None = None) -> int:
    """Distinct nodes reachable from ``roots`` (shared subtrees counted once)."""
    seen = set() if seen is None else seen
    stack = [r for r in roots if r is not None]
    while stack:
        t = stack.pop()
        if id(t) in seen:
            continue
        seen.add(id(t))
        if t.left is not None:
            stack.append(t.left)
        if t.right is not None:
            stack.append(t.right)
    return len(seen)


def map_reduce(t: Node | None, f: Callable, combine: Callable | None = None, identity=None):
    """Apply ``f(key, value)`` to every entry in key order.

    With ``combine`` the results are folded left to right starting from
    ``identity``; without it ``f`` is run for its effects and None returned.
    """
    if combine is None:
        for k, v in items(t):
            f(k, v)
        return None
    acc = identity
    for k, v in items(t):
        acc = combine(acc, f(k, v))
    return acc


def check_balance(t: Node | None) -> None:
    """Raise AssertionError if any node violates the weight-balance predicate."""
    if t is None:
        return
    wl = size(t.left) + 1
    wr = size(t.right) + 1
    if t.size != wl + wr - 1:
        raise AssertionError(f"bad size at key {t.key!r}")
    if not _like(wl, wr):
        raise AssertionError(f"unbalanced at key {t.key!r}: {wl - 1} vs {wr - 1}")
    check_balance(t.left)
    check_balance(t.right)


class TreeOps:
    """Join-based algorithms over nodes augmented with a monoid.

    ``measure(value)`` maps a stored value into the monoid and ``combine`` is
    its associative operation with ``identity`` as unit.  With no measure
    the ``aug`` field is left as None.
    """

    def __init__(self, measure: Callable | None = None, combine: Callable = None, identity=0):
        self.measure = measure
        self.combine = combine
        self.identity = identity
        if measure is None:
            self.node = self._plain_node
        elif combine is None:
            self.node = self._sum_node
        else:
            self.node = self._monoid_node

    # node construction -------------------------------------------------

    def _plain_node(self, l, k, v, r):
        return Node(l, k, v, r,
                    (l.size if l is not None else 0) + (r.size if r is not None else 0) + 1,
                    None)

    def _sum_node(self, l, k, v, r):
        s = 1
        a = self.measure(v)
        if l is not None:
            s += l.size
            a += l.aug
        if r is not None:
            s += r.size
            a += r.aug
        return Node(l, k, v, r, s, a)

    def _monoid_node(self, l, k, v, r):
        s = 1
        c = self.combine
        a = self.measure(v)
        if l is not None:
            s += l.size
            a = c(l.aug, a)
        if r is not None:
            s += r.size
            a = c(a, r.aug)
        return Node(l, k, v, r, s, a)

    def aug(self, t: Node | None):
        return self.identity if t is None else t.aug

    def singleton(self, k, v):
        return self.node(None, k, v, None)

    def check_aug(self, t: Node | None):
        """Recompute every node's augmentation by brute force and compare."""
        if t is None or self.measure is None:
            return self.identity
        a = self.measure(t.value)
        if self.combine is None:
            expect = self.check_aug(t.left) + a + self.check_aug(t.right)
        else:
            expect = self.combine(self.combine(self.check_aug(t.left), a), self.check_aug(t.right))
        if expect != t.aug:
            raise AssertionError(f"stale augmentation at key {t.key!r}")
        return expect

    # build ---------------------------------------------------------------

    def build(self, entries: Sequence[tuple[Any, Any]]) -> Node | None:
        ks = [e[0] for e in entries]
        vs = [e[1] for e in entries]
        for i in range(1, len(ks)):
            if not ks[i - 1] < ks[i]:
                raise ContractViolation(f"build input not strictly increasing at index {i}")
        return self.build_sorted(ks, vs)

    def build_sorted(self, ks: Sequence, vs: Sequence) -> Node | None:
        """Build from parallel key/value sequences already known to be sorted and unique."""
        return self._build(ks, vs, 0, len(ks))

    def _build(self, ks, vs, lo, hi):
        if lo >= hi:
            return None
        mid = (lo + hi) >> 1
        return self.node(self._build(ks, vs, lo, mid), ks[mid], vs[mid], self._build(ks, vs, mid + 1, hi))

    # join ----------------------------------------------------------------

    def join(self, l, k, v, r):
        wl = (l.size if l is not None else 0) + 1
        wr = (r.size if r is not None else 0) + 1
        if _like(wl, wr):
            return self.node(l, k, v, r)
        if wl > wr:
            return self._join_right(l, k, v, r)
        return self._join_left(l, k, v, r)

    def _join_right(self, l, k, v, r):
        # l is too heavy: descend its right spine
        wr = (r.size if r is not None else 0) + 1
        if _like(l.size + 1, wr):
            return self.node(l, k, v, r)
        ll = l.left
        t = self._join_right(l.right, k, v, r) if l.right is not None else self.join(None, k, v, r)
        node = self.node
        wll = (ll.size if ll is not None else 0) + 1
        if _like(wll, t.size + 1):
            return node(ll, l.key, l.value, t)
        tl, tr = t.left, t.right
        wtl = (tl.size if tl is not None else 0) + 1
        wtr = (tr.size if tr is not None else 0) + 1
        if _like(wll, wtl) and _like(wll + wtl, wtr):
            # single left rotation
            return node(node(ll, l.key, l.value, tl), t.key, t.value, tr)
        # double rotation: right on t, then left
        return node(node(ll, l.key, l.value, tl.left), tl.key, tl.value,
                    node(tl.right, t.key, t.value, tr))

    def _join_left(self, l, k, v, r):
        wl = (l.size if l is not None else 0) + 1
        if _like(wl, r.size + 1):
            return self.node(l, k, v, r)
        rr = r.right
        t = self._join_left(l, k, v, r.left) if r.left is not None else self.join(l, k, v, None)
        node = self.node
        wrr = (rr.size if rr is not None else 0) + 1
        if _like(t.size + 1, wrr):
            return node(t, r.key, r.value, rr)
        tl, tr = t.left, t.right
        wtl = (tl.size if tl is not None else 0) + 1
        wtr = (tr.size if tr is not None else 0) + 1
        if _like(wrr, wtr) and _like(wrr + wtr, wtl):
            return node(tl, t.key, t.value, node(tr, r.key, r.value, rr))
        return node(node(tl, t.key, t.value, tr.left), tr.key, tr.value,
                    node(tr.right, r.key, r.value, rr))

    def join_checked(self, l, k, v, r):
        """join() that first verifies ``l < k < r``."""
        if l is not None and not last(l)[0] < k:
            raise ContractViolation("join: left tree has a key >= the middle key")
        if r is not None and not k < first(r)[0]:
            raise ContractViolation("join: right tree has a key <= the middle key")
        return self.join(l, k, v, r)

    def split_last(self, t):
        """(tree without its maximum, max key, max value)."""
        if t.right is None:
            return t.left, t.key, t.value
        rest, k, v = self.split_last(t.right)
        return self.join(t.left, t.key, t.value, rest), k, v

    def join2(self, l, r):
        if l is None:
            return r
        if r is None:
            return l
        rest, k, v = self.split_last(l)
        return self.join(rest, k, v, r)

    def join2_checked(self, l, r):
        if l is not None and r is not None and not last(l)[0] < first(r)[0]:
            raise ContractViolation("join2: trees overlap")
        return self.join2(l, r)

    # split / set operations ----------------------------------------------

    def split(self, t, key):
        """Return ``(left, found, value, right)``; ``value`` is None when not found."""
        if t is None:
            return None, False, None, None
        k = t.key
        if key < k:
            l, found, v, r = self.split(t.left, key)
            return l, found, v, self.join(r, k, t.value, t.right)
        if k < key:
            l, found, v, r = self.split(t.right, key)
            return self.join(t.left, k, t.value, l), found, v, r
        return t.left, True, t.value, t.right

    def union(self, t1, t2, combine: Callable | None = None):
        """Union of two trees; shared keys get ``combine(v1, v2)`` (default: v2)."""
        if t1 is None:
            return t2
        if t2 is None:
            return t1
        k = t2.key
        l1, found, v1, r1 = self.split(t1, k)
        left = self.union(l1, t2.left, combine)
        right = self.union(r1, t2.right, combine)
        v = t2.value
        if found and combine is not None:
            v = combine(v1, v)
        return self.join(left, k, v, right)

    def difference(self, t1, t2):
        """Entries of ``t1`` whose keys are absent from ``t2``."""
        if t1 is None or t2 is None:
            return t1
        l1, _, _, r1 = self.split(t1, t2.key)
        return self.join2(self.difference(l1, t2.left), self.difference(r1, t2.right))

    def intersection(self, t1, t2, combine: Callable | None = None):
        if t1 is None or t2 is None:
            return None
        k = t2.key
        l1, found, v1, r1 = self.split(t1, k)
        left = self.intersection(l1, t2.left, combine)
        right = self.intersection(r1, t2.right, combine)
        if not found:
            return self.join2(left, right)
        v = v1 if combine is None else combine(v1, t2.value)
        return self.join(left, k, v, right)

    def filter(self, t, pred: Callable):
        """Keep entries with ``pred(key, value)`` true."""
        if t is None:
            return None
        l = self.filter(t.left, pred)
        r = self.filter(t.right, pred)
        if pred(t.key, t.value):
            if l is t.left and r is t.right:
                return t
            return self.join(l, t.key, t.value, r)
        return self.join2(l, r)

    # batch updates ---------------------------------------------------------

    def multi_insert(self, t, updates: Sequence[tuple[Any, Any]], combine: Callable | None = None):
        """Insert sorted, duplicate-free ``(key, value)`` updates.

        Existing keys get ``combine(old, new)`` (default: the new value).
        """
        ks = [u[0] for u in updates]
        vs = [u[1] for u in updates]
        for i in range(1, len(ks)):
            if not ks[i - 1] < ks[i]:
                raise ContractViolation(f"multi_insert updates not strictly increasing at index {i}")
        return self.multi_insert_sorted(t, ks, vs, combine)

    def multi_insert_sorted(self, t, ks, vs, combine=None):
        if not ks:
            return t
        return self._multi_insert(t, ks, vs, 0, len(ks), combine)

    def _multi_insert(self, t, ks, vs, lo, hi, combine):
        if lo >= hi:
            return t
        if t is None:
            return self._build(ks, vs, lo, hi)
        k = t.key
        m = bisect_left(ks, k, lo, hi)
        if m < hi and ks[m] == k:
            v = vs[m] if combine is None else combine(t.value, vs[m])
            rlo = m + 1
        else:
            v = t.value
            rlo = m
        return self.join(self._multi_insert(t.left, ks, vs, lo, m, combine), k, v,
                         self._multi_insert(t.right, ks, vs, rlo, hi, combine))

    def multi_update(self, t, ks, vs, f: Callable):
        """For each sorted key already in ``t`` set value to ``f(old, new)``.

        Keys missing from ``t`` are ignored.  ``f`` may return ``REMOVE``.
        """
        if not ks or t is None:
            return t
        return self._multi_update(t, ks, vs, 0, len(ks), f)

    def _multi_update(self, t, ks, vs, lo, hi, f):
        if lo >= hi or t is None:
            return t
        k = t.key
        m = bisect_left(ks, k, lo, hi)
        if m < hi and ks[m] == k:
            v = f(t.value, vs[m])
            rlo = m + 1
        else:
            v = t.value
            rlo = m
        l = self._multi_update(t.left, ks, vs, lo, m, f)
        r = self._multi_update(t.right, ks, vs, rlo, hi, f)
        if v is REMOVE:
            return self.join2(l, r)
        if l is t.left and r is t.right and v is t.value:
            return t
        return self.join(l, k, v, r)

    def multi_delete(self, t, ks: Sequence):
        """Remove the sorted keys ``ks`` (absent keys are ignored)."""
        if not ks or t is None:
            return t
        return self._multi_delete(t, ks, 0, len(ks))

    def _multi_delete(self, t, ks, lo, hi):
        if lo >= hi or t is None:
            return t
        k = t.key
        m = bisect_left(ks, k, lo, hi)
        hit = m < hi and ks[m] == k
        l = self._multi_delete(t.left, ks, lo, m)
        r = self._multi_delete(t.right, ks, m + 1 if hit else m, hi)
        if hit:
            return self.join2(l, r)
        if l is t.left and r is t.right:
            return t
        return self.join(l, k, t.value, r)


plain = TreeOps()
