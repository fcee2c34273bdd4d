import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ctreegraph import ctree, pftree
from ctreegraph.ctree import CTree
from ctreegraph.errors import ContractViolation
from ctreegraph.hashing import hash64, hash64_array, head_mask, is_head

from conftest import random_set

BS = [1, 2, 8, 256]


def check(t: CTree, expected):
    ctree.audit(t)
    assert t.elements() == sorted(expected)
    assert t.size == len(expected)


def collect(t):
    out = []
    ctree.map(t, out.append)
    return out


def non_heads(b, lo, hi):
    return [x for x in range(lo, hi) if not is_head(x, b)]


def test_hash_scalar_matches_vector(rng):
    xs = [rng.randrange(1 << 63) for _ in range(2000)] + list(range(100))
    assert hash64_array(np.array(xs, dtype=np.uint64)).tolist() == [hash64(x) for x in xs]
    for b in (1, 3, 8, 256, 1000):
        assert head_mask(np.array(xs, dtype=np.uint64), b).tolist() == [is_head(x, b) for x in xs]


def test_build_empty():
    t = ctree.build([], 8)
    assert t.size == 0 and collect(t) == [] and not t


def test_build_dedups():
    t = ctree.build([5, 3, 9, 3], 2)
    check(t, {3, 5, 9})
    assert collect(t) == [3, 5, 9]
    assert ctree.size(ctree.build([3, 3, 5], 8)) == 2


@pytest.mark.parametrize("b", BS)
def test_build_large(b):
    r = np.random.default_rng(b)
    xs = r.integers(0, 1 << 40, 10**5)
    t = ctree.build(xs, b)
    check(t, set(xs.tolist()))


def test_build_rejects_negative_and_bad_b():
    with pytest.raises(ContractViolation):
        ctree.build([-1, 2], 8)
    with pytest.raises(ContractViolation):
        ctree.build([1], 0)


@pytest.mark.parametrize("b", BS)
def test_find_heads_and_non_heads(b, rng):
    s = random_set(rng, 1000) | set(range(50))
    t = ctree.build(s, b)
    assert not ctree.find(ctree.empty(b), 7)
    heads = [x for x in s if is_head(x, b)]
    others = [x for x in s if not is_head(x, b)]
    assert all(ctree.find(t, x) for x in heads)
    assert all(ctree.find(t, x) for x in others)
    probes = [rng.randrange(1 << 62) for _ in range(500)] + list(range(50, 200))
    for x in probes:
        assert ctree.find(t, x) == (x in s)


def test_map_order():
    assert collect(ctree.build(range(1, 101), 8)) == list(range(1, 101))


def test_split_examples():
    l, found, r = ctree.split(ctree.empty(8), 3)
    assert (l.size, found, r.size) == (0, False, 0)
    l, found, r = ctree.split(ctree.build([1, 5, 9], 8), 5)
    assert (l.elements(), found, r.elements()) == ([1], True, [9])


@pytest.mark.parametrize("b", BS)
def test_split_random(b, rng):
    for _ in range(150):
        s = random_set(rng, 500)
        t = ctree.build(s, b)
        k = rng.choice(sorted(s)) if s and rng.random() < 0.5 else rng.randrange(1 << 62)
        l, found, r = ctree.split(t, k)
        check(l, {x for x in s if x < k})
        check(r, {x for x in s if x > k})
        assert found == (k in s)


def test_union_examples():
    t = ctree.build([1, 2, 3], 2)
    check(ctree.union(t, ctree.empty(2)), {1, 2, 3})
    check(ctree.union(ctree.empty(2), t), {1, 2, 3})
    check(ctree.union(t, ctree.build([3, 4], 2)), {1, 2, 3, 4})


def test_mismatched_b_rejected():
    a = ctree.build([1, 2], 2)
    c = ctree.build([3], 8)
    for op in (ctree.union, ctree.difference, ctree.intersection):
        with pytest.raises(ContractViolation):
            op(a, c)


def test_union_bc_example():
    b = 8
    h = next(x for x in range(10, 10**6) if is_head(x, b))
    below = non_heads(b, 0, h)
    p_elems, c_prefix = below[:2], below[2:3]
    p = ctree.from_sorted(p_elems, b)
    assert p.tree is None
    c = ctree.build(c_prefix + [h, h + 1000], b)
    u = ctree.union_bc(p, c)
    check(u, set(p_elems) | set(c_prefix) | {h, h + 1000})
    assert ctree.structure(u)[0] == sorted(p_elems + c_prefix)
    assert ctree.union_bc(ctree.empty(b), c).elements() == c.elements()


@pytest.mark.parametrize("b", BS)
def test_union_bc_random(b, rng):
    for _ in range(150):
        s1 = {x for x in random_set(rng, 300) if not is_head(x, b)}
        s2 = random_set(rng, 500)
        p = ctree.from_sorted(sorted(s1), b)
        c = ctree.build(s2, b)
        check(ctree.union_bc(p, c), s1 | s2)


def test_difference_intersection_identities(rng):
    for b in BS:
        s = random_set(rng, 500)
        t = ctree.build(s, b)
        check(ctree.difference(t, t), set())
        check(ctree.intersection(t, ctree.empty(b)), set())
        check(ctree.difference(t, ctree.empty(b)), s)
        check(ctree.intersection(t, t), s)


@pytest.mark.parametrize("b", BS)
def test_set_algebra_random(b, rng):
    for _ in range(200):
        a, c = random_set(rng, 1000), random_set(rng, 1000)
        if rng.random() < 0.3:
            c |= set(rng.sample(sorted(a), len(a) // 2)) if a else set()
        ta, tc = ctree.build(a, b), ctree.build(c, b)
        before = ctree.structure(ta), ctree.structure(tc)
        check(ctree.union(ta, tc), a | c)
        check(ctree.difference(ta, tc), a - c)
        check(ctree.intersection(ta, tc), a & c)
        assert (ctree.structure(ta), ctree.structure(tc)) == before


def test_multi_insert_delete(rng):
    for b in BS:
        s = random_set(rng, 800)
        t = ctree.build(s, b)
        assert ctree.multi_insert(t, []).elements() == t.elements()
        fresh = [x for x in (rng.randrange(1 << 62) for _ in range(100)) if x not in s]
        ins = ctree.multi_insert(t, fresh + fresh[:10])
        check(ins, s | set(fresh))
        check(ctree.multi_delete(ins, fresh), s)
        drop = rng.sample(sorted(s), len(s) // 3) if s else []
        check(ctree.multi_delete(t, drop + [1 << 62]), s - set(drop))


def test_canonical_form(rng):
    for b in BS:
        for _ in range(30):
            a, c = random_set(rng, 400), random_set(rng, 400)
            built = ctree.build(a | c, b)
            via_union = ctree.union(ctree.build(a, b), ctree.build(c, b))
            via_steps = ctree.multi_delete(ctree.multi_insert(ctree.build(a, b), sorted(c | {7})),
                                           [] if 7 in a | c else [7])
            assert ctree.structure(via_union) == ctree.structure(built)
            assert ctree.structure(via_steps) == ctree.structure(built)
            assert built.head_keys() == sorted(x for x in a | c if is_head(x, b))


def test_bulk_and_small_builders_agree(rng):
    for b in BS:
        xs = sorted(random_set(rng, 3000) | set(range(600)))
        bulk = ctree.build(np.array(xs, dtype=np.int64), b)
        small = CTree(None, None, b)
        for i in range(0, len(xs), 100):
            small = ctree.union(small, ctree.from_sorted(xs[i:i + 100], b))
        assert ctree.structure(bulk) == ctree.structure(small)


def test_build_many_matches_build(rng):
    groups = [sorted(random_set(rng, 50)) for _ in range(40)]
    offsets = np.cumsum([0] + [len(g) for g in groups])
    values = np.array([x for g in groups for x in g], dtype=np.int64)
    for b in BS:
        trees = ctree.build_many(offsets, values, b)
        for g, t in zip(groups, trees):
            assert ctree.structure(t) == ctree.structure(ctree.build(g, b))


def test_head_count_and_chunk_length_small_scale():
    n, b = 10**5, 64
    xs = np.random.default_rng(11).integers(0, 1 << 60, n)
    t = ctree.build(xs, b)
    heads = pftree.size(t.tree)
    sigma = math.sqrt(n / b * (1 - 1 / b))
    assert abs(heads - n / b) <= 6 * sigma
    longest = max(v.count for _, v in pftree.items(t.tree) if v is not None)
    assert longest <= 4 * b * math.log(n)


small_sets = st.sets(st.integers(0, 2000), max_size=120)


@settings(max_examples=150, deadline=None)
@given(small_sets, small_sets, st.sampled_from(BS), st.integers(0, 2001))
def test_hypothesis_ops(a, c, b, k):
    ta, tc = ctree.build(a, b), ctree.build(c, b)
    check(ctree.union(ta, tc), a | c)
    check(ctree.difference(ta, tc), a - c)
    check(ctree.intersection(ta, tc), a & c)
    l, found, r = ctree.split(ta, k)
    check(l, {x for x in a if x < k})
    check(r, {x for x in a if x > k})
    assert found == (k in a)
    assert sorted(a) == collect(ta)
