"""Seed handling: every random stream in the package is derived from a
run seed plus a fixed stream key, so that solver randomness and oracle
noise never share a generator."""

from __future__ import annotations

import numpy as np

# Stream keys. Fixed integers; changing them changes every frozen trace.
ORACLE = 1
SAMPLER = 2
SWAP = 3
INIT = 4
EVAL = 5


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return an independent generator for ``(seed, key...)``."""
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))
