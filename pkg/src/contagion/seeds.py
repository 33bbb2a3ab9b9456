"""Deterministic RNG stream derivation.

Scheme "seedseq-tuple-v1": every stream is a numpy PCG64 generator seeded
with SeedSequence((master_seed, *key)), where key is a tuple of small
non-negative integers identifying the consumer (replica index, sweep
position, ...). Streams for distinct keys are statistically independent
and reproducible across platforms and thread counts.
"""

from __future__ import annotations

import numpy as np

SEED_SCHEME = "seedseq-tuple-v1"


def stream(master_seed: int, *key: int) -> np.random.Generator:
    if master_seed < 0:
        raise ValueError(f"master seed must be non-negative, got {master_seed}")
    return np.random.default_rng(np.random.SeedSequence((master_seed, *key)))
