import numpy as np
import pytest

from ctreegraph.rmat import rmat_generate, rmat_undirected


def test_all_mass_on_a():
    s, d = rmat_generate(10, 1000, 1.0, 0.0, 0.0, seed=3)
    assert not s.any() and not d.any()


def test_deterministic_per_seed():
    a = rmat_generate(12, 5000, 0.5, 0.1, 0.1, seed=7)
    b = rmat_generate(12, 5000, 0.5, 0.1, 0.1, seed=7)
    c = rmat_generate(12, 5000, 0.5, 0.1, 0.1, seed=8)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert not np.array_equal(a[0], c[0])


def test_depth1_quadrant_frequencies():
    m = 10**6
    log_n = 10
    s, d = rmat_generate(log_n, m, 0.5, 0.1, 0.1, seed=1)
    half = 1 << (log_n - 1)
    top, left = s < half, d < half
    freq = [np.mean(top & left), np.mean(top & ~left), np.mean(~top & left), np.mean(~top & ~left)]
    for got, want in zip(freq, (0.5, 0.1, 0.1, 0.3)):
        assert abs(got - want) <= 0.01


def test_range_and_count():
    s, d = rmat_generate(5, 2000, 0.25, 0.25, 0.25, seed=0)
    assert len(s) == len(d) == 2000
    assert s.min() >= 0 and s.max() < 32 and d.max() < 32
    assert len(rmat_generate(0, 10, 0.5, 0.1, 0.1)[0]) == 10


@pytest.mark.parametrize("args", [(31, 0.5, 0.1, 0.1), (4, 0.6, 0.3, 0.2), (4, -0.1, 0.1, 0.1), (4, 0.5, 1.2, 0.0)])
def test_invalid_params(args):
    log_n, a, b, c = args
    with pytest.raises(ValueError):
        rmat_generate(log_n, 10, a, b, c)


def test_undirected_pairs_interleaved():
    s, d = rmat_undirected(8, 3000, 0.5, 0.1, 0.1, seed=2)
    assert len(s) % 2 == 0
    assert np.array_equal(s[0::2], d[1::2]) and np.array_equal(d[0::2], s[1::2])
    assert not np.any(s == d)
