"""rMAT (recursive matrix) edge generator."""
from __future__ import annotations

import numpy as np

MAX_LOG_N = 30


def check_params(log_n: int, a: float, b: float, c: float) -> None:
    if not 0 <= log_n <= MAX_LOG_N:
        raise ValueError(f"log_n must be in [0, {MAX_LOG_N}], got {log_n}")
    for name, p in (("a", a), ("b", b), ("c", c)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability {name}={p} outside [0, 1]")
    if a + b + c > 1.0 + 1e-12:
        raise ValueError(f"a + b + c = {a + b + c} exceeds 1")


def rmat_generate(log_n: int, m: int, a: float, b: float, c: float, seed: int = 0,
                  chunk: int = 1 << 22) -> tuple[np.ndarray, np.ndarray]:
    """``m`` directed pairs over ``[0, 2**log_n)``; duplicates are kept.

    Each pair picks one quadrant per level, most significant bit first:
    top-left with probability a, top-right b, bottom-left c, bottom-right
    1 - a - b - c.
    """
    check_params(log_n, a, b, c)
    if m < 0:
        raise ValueError("m must be non-negative")
    rng = np.random.Generator(np.random.PCG64(seed))
    src = np.zeros(m, dtype=np.int64)
    dst = np.zeros(m, dtype=np.int64)
    t1, t2, t3 = a, a + b, a + b + c
    for lo in range(0, m, chunk):
        hi = min(m, lo + chunk)
        s = src[lo:hi]
        d = dst[lo:hi]
        for level in range(log_n):
            bit = np.int64(1) << np.int64(log_n - 1 - level)
            r = rng.random(hi - lo)
            row = r >= t2
            col = ((r >= t1) & (r < t2)) | (r >= t3)
            s |= np.where(row, bit, 0)
            d |= np.where(col, bit, 0)
    return src, dst


def rmat_undirected(log_n: int, m: int, a: float, b: float, c: float, seed: int = 0):
    """``m`` rMAT pairs with self-loops removed, each emitted in both directions.

    Returns ``(src, dst)`` of length ``2 * kept``; pair i's two directions
    sit at positions 2i and 2i+1 so a stream cut at even offsets stays
    symmetric.
    """
    s, d = rmat_generate(log_n, m, a, b, c, seed)
    keep = s != d
    s, d = s[keep], d[keep]
    src = np.empty(2 * len(s), dtype=np.int64)
    dst = np.empty(2 * len(s), dtype=np.int64)
    src[0::2], dst[0::2] = s, d
    src[1::2], dst[1::2] = d, s
    return src, dst
