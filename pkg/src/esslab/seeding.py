"""Deterministic random-stream derivation.

Every stochastic routine in this package takes an explicit
``numpy.random.Generator``.  A single 64-bit master seed fully determines
all outputs; independent substreams (one per replicate, per grid point,
per worker) are derived with the splitting rule

    substream(master_seed, *key) == Generator(PCG64(SeedSequence(master_seed, spawn_key=key)))

so that results are bit-identical no matter how work is distributed.
"""

from __future__ import annotations

import numpy as np

RandomStream = np.random.Generator


def stream(seed: int) -> RandomStream:
    """Create the master random stream for a given 64-bit seed."""
    return np.random.default_rng(seed)


def substream(master_seed: int, *key: int) -> RandomStream:
    """Derive an independent substream keyed by (master_seed, *key)."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))


def substream_seed(master_seed: int, *key: int) -> int:
    """Derive a 64-bit integer seed keyed by (master_seed, *key).

    Used where a nested component (e.g. one grid point of an experiment)
    needs its own master seed to split further.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=key)
    return int(ss.generate_state(1, np.uint64)[0])
