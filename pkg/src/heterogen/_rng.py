"""Seeded random streams.

Every random draw in the package goes through :func:`make_rng`, which wraps
the counter-based Philox bit generator. Child seeds are derived with
``numpy.random.SeedSequence``, whose hashing is stable across platforms and
numpy releases.
"""

import numpy as np

MASK64 = (1 << 64) - 1


def check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(check_seed(seed))))


def derive_seed(*keys: int) -> int:
    """Stable 64-bit mix of a tuple of nonnegative integers."""
    entropy = [check_seed(k) for k in keys]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def pipeline_seeds(seed: int) -> tuple[int, int]:
    """(graph seed, feature seed) used by every generate-style entry point."""
    return derive_seed(seed, 0), derive_seed(seed, 1)
