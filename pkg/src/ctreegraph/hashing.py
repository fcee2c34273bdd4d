"""Deterministic 64-bit integer mixing shared by every C-tree in the process.

The scalar and numpy versions must agree bit for bit: head selection is
done element-by-element in small builds and vectorised in bulk builds.
"""
import numpy as np

MASK64 = (1 << 64) - 1
SEED = 0x5A17_C0DE_2019_D15C

_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def hash64(x: int, seed: int = SEED) -> int:
    z = (x ^ seed) & MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def hash64_array(xs, seed: int = SEED) -> np.ndarray:
    z = np.asarray(xs).astype(np.uint64) ^ np.uint64(seed)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def is_head(x: int, b: int) -> bool:
    return hash64(x) % b == 0


def head_mask(xs, b: int) -> np.ndarray:
    h = hash64_array(xs)
    if b & (b - 1) == 0:
        return (h & np.uint64(b - 1)) == 0
    return (h % np.uint64(b)) == 0
