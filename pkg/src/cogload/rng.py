"""Deterministic random number streams.

Every random draw in the platform comes from a PCG64 generator keyed by
(seed, stream id) through numpy's SeedSequence spawn mechanism.  Each
subsystem owns a fixed stream id, so adding or removing draws in one
subsystem never perturbs the sequence seen by another.  Identical
(seed, stream) pairs produce bit-identical sequences across runs and
platforms.
"""

from __future__ import annotations

import numpy as np

# Fixed stream ids.  Never renumber: recorded sessions depend on them.
STREAM_ARITHMETIC = 1
STREAM_BEEPS = 2
STREAM_SENSORS = 3
STREAM_PARTICIPANT = 4


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    """Return the PCG64 generator for one (seed, stream id) pair."""
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    seq = np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.PCG64(seq))
