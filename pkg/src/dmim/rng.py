"""Deterministic random streams.

All randomness in this package flows through numpy's Philox bit generator, a
64-bit counter-based generator. A stream is fully determined by the pair
(seed, stream): Philox takes a two-word key, so distinct stream ids give
statistically independent, individually reproducible streams without any
jump-ahead bookkeeping. Parallel replication r of a Monte Carlo run uses
stream (seed, r); merging results by replication index therefore gives output
that is independent of worker count.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def make_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for the (seed, stream) pair; same pair -> same bits, always."""
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(seed: int, index: int) -> int:
    """Derive a child seed from (seed, index) with a splitmix64 step.

    Used where a family of related runs (e.g. the cells of a results table)
    must each own an independent seed while the whole family stays
    reproducible from one master seed.
    """
    z = (seed + 0x9E3779B97F4A7C15 * (index + 1)) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64
