"""
Seed handling.

All randomness in the toolkit comes from numpy's PCG64 bit generator.
Derived streams (one per k-means restart, one per sampled configuration)
are built with ``SeedSequence(entropy=seed, spawn_key=(...))``, which is
numpy's documented, platform-independent way of mixing a parent seed with
a child index.
"""

import secrets

import numpy as np

SEED_BITS = 64
MAX_SEED = 2**SEED_BITS - 1


def validate_seed(seed: int) -> int:
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be in [0, 2**{SEED_BITS}), got {seed}")
    return seed


def fresh_seed() -> int:
    """Draw a seed from system entropy; callers record it in the run manifest."""
    return secrets.randbits(SEED_BITS)


def make_rng(seed: int, *spawn_key: int) -> np.random.Generator:
    """
    Build a generator for ``seed``, optionally specialised by ``spawn_key``.

    ``make_rng(s)`` and ``make_rng(s, r)`` are independent streams, and the
    same arguments always give the same stream on every platform.
    """
    sequence = np.random.SeedSequence(entropy=validate_seed(seed), spawn_key=spawn_key)
    return np.random.Generator(np.random.PCG64(sequence))
