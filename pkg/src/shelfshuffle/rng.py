"""Seeded, counter-based random streams.

Every stream is a Philox4x64 generator keyed by ``SeedSequence(seed,
spawn_key=(stream_id,))``, so the draws for one stream never depend on which
other streams were used, in what order, or on how many worker threads ran.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass

import numpy as np

GENERATOR_VERSION = f"philox4x64/seedsequence/numpy-{np.__version__.split('.')[0]}/v1"

# Monte Carlo batches are split into chunks of this many trials; chunk k draws
# from stream k. Changing it changes every report, so it is part of the version.
CHUNK_SIZE = 1024


@dataclass(frozen=True)
class RngSeed:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.stream_id < 0:
            raise ValueError("stream_id must be non-negative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(ss))

    def stream(self, stream_id: int) -> RngSeed:
        return RngSeed(self.seed, stream_id)


def fresh_seed() -> int:
    """A seed from system entropy, for runs where the caller gave none."""
    return secrets.randbits(64)


def chunk_bounds(trials: int, chunk_size: int = CHUNK_SIZE) -> list[tuple[int, int, int]]:
    """``(stream_id, start, stop)`` for each chunk covering ``range(trials)``."""
    return [(k, start, min(start + chunk_size, trials))
            for k, start in enumerate(range(0, trials, chunk_size))]
