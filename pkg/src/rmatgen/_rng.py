"""Keyed counter-based random streams.

Every random decision in this package comes from a Philox stream keyed by
two 64-bit words: (seed XOR domain constant, payload).  Philox is counter
based, so streams with distinct keys never overlap and any stream can be
constructed in isolation -- a worker can generate block 4093 without first
generating blocks 0..4092.  The domain constants keep the different stream
families (edge blocks, partition-tree nodes, tiles, table perturbation)
apart even when their integer payloads collide.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

DOMAIN_BLOCK = 0x9E3779B97F4A7C15
DOMAIN_NODE = 0xBF58476D1CE4E5B9
DOMAIN_TILE = 0x94D049BB133111EB
DOMAIN_PERTURB = 0xD6E8FEB86659FD93
DOMAIN_ORACLE = 0xFF51AFD7ED558CCD


def keyed_stream(seed: int, domain: int, payload: int) -> np.random.Generator:
    """A Generator whose stream is a pure function of (seed, domain, payload)."""
    key = np.array([(seed ^ domain) & MASK64, payload & MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def raw_words(gen: np.random.Generator, n: int) -> np.ndarray:
    """Draw n raw 64-bit words from the generator's bit stream.

    The underlying stream is consumed one word per output word, so drawing
    in several calls yields the same sequence as one big call.  That makes
    batched consumers reproducible regardless of their batch sizes.
    """
    return gen.bit_generator.random_raw(n)


def mix64(x: int) -> int:
    """Scalar 64-bit finalizer (splitmix64 output function).

    Used to derive fixed key material, e.g. scramble round constants, from
    a seed. Bijective on 64-bit words.
    """
    x &= MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)
