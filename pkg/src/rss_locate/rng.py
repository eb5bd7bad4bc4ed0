"""Seeded random streams.

Every stream is a numpy ``Generator`` driven by the PCG64 bit generator.
Per-(trial, epoch) streams are derived with ``numpy.random.SeedSequence``
so that a trial's draws never depend on which other trials ran before it.
"""

import numpy as np

from rss_locate.errors import ConfigError

MAX_SEED = 2**64 - 1


def _check_seed(seed):
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def derive_seed(seed: int, *keys: int) -> int:
    """Mix a base seed with integer keys (e.g. trial, epoch) into a new 64-bit seed."""
    seed = _check_seed(seed)
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


class Rng:
    """Deterministic PCG64 stream. One owner at a time; not thread-safe."""

    algorithm = "PCG64"

    def __init__(self, seed: int):
        self.seed = _check_seed(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size)

    def standard_normal(self, size=None):
        return self._gen.standard_normal(size)

    def __repr__(self):
        return f"Rng(seed={self.seed})"
