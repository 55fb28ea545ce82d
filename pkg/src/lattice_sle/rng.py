"""Counter-based random streams (Philox) with a documented seed derivation.

Stream ``i`` of master seed ``s`` is ``Philox(key=[s, i])``. Streams are
independent of the order in which workers consume them, so results do not
depend on the thread count.
"""
import numpy as np

RNG_ALGORITHM = "Philox4x64-10"
_MASK = (1 << 64) - 1


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    key = np.array([int(seed) & _MASK, int(stream) & _MASK], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def as_rng(rng) -> np.random.Generator:
    """Accept a Generator, an int seed or None (seed 0)."""
    if isinstance(rng, np.random.Generator):
        return rng
    return make_rng(0 if rng is None else int(rng))


def child_seeds(rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw ``n`` 63-bit seeds for sub-streams from a parent generator."""
    return rng.integers(0, 2 ** 63 - 1, size=n, dtype=np.int64)
