"""Per-edge postprocessing: mirroring, ID scrambling, duplicate removal.

All three stages cost constant work per edge and are pure functions, so
they compose freely with blockwise or tile-wise generation: mirroring
canonicalizes an edge into the lower-left triangle, scrambling applies a
seed-determined permutation to vertex IDs so structural position no
longer correlates with ID value, and dedup_local removes repeats within
one block or tile.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import MASK64, mix64

_GOLDEN = 0x9E3779B97F4A7C15


class EdgeOutsideDeclaredTile(ValueError):
    """An edge endpoint falls outside the tile the batch was declared for."""


def to_undirected(edges: np.ndarray) -> np.ndarray:
    """Canonicalize each edge into the lower-left triangle: (max, min).

    Idempotent; the diagonal is fixed.  For a symmetric edge list with
    both orientations, see `mirrored`.
    """
    out = np.empty_like(edges)
    out[:, 0] = np.maximum(edges[:, 0], edges[:, 1])
    out[:, 1] = np.minimum(edges[:, 0], edges[:, 1])
    return out


def mirrored(edges: np.ndarray) -> np.ndarray:
    """Both orientations of every edge, (u,v) immediately followed by (v,u)."""
    out = np.empty((2 * len(edges), 2), dtype=edges.dtype)
    out[0::2] = edges
    out[1::2] = edges[:, ::-1]
    return out


@dataclass(frozen=True)
class ScrambleKey:
    """Per-(seed, k) key material: four rounds of (multiplier, xor shift, rotation).

    Each round is invertible mod 2^k on its own -- the multiplier is odd,
    the xor-shift distance is in [1, k) (0 marks the round as skipped,
    which only happens at k=1), and rotation permutes bit positions -- so
    the composition is a permutation of [0, 2^k).
    """

    seed: int
    k: int
    round_keys: tuple[tuple[int, int, int], ...]


def make_scramble_key(seed: int, k: int) -> ScrambleKey:
    """Derive scramble rounds from (seed, k) via a 64-bit finalizer chain."""
    if not 1 <= k <= 62:
        raise ValueError(f"k must be in [1, 62], got {k}")
    mask = (1 << k) - 1
    x = mix64((seed & MASK64) ^ mix64(k))
    rounds = []
    for _ in range(4):
        x = mix64((x + _GOLDEN) & MASK64)
        mult = (x & mask) | 1
        x = mix64((x + _GOLDEN) & MASK64)
        xshift = 1 + x % (k - 1) if k > 1 else 0
        x = mix64((x + _GOLDEN) & MASK64)
        rot = x % k
        rounds.append((mult, xshift, rot))
    return ScrambleKey(seed=seed, k=k, round_keys=tuple(rounds))


def scramble(values, key: ScrambleKey):
    """Apply the key's permutation of [0, 2^k) to an int or uint64 array."""
    k = key.k
    scalar = not isinstance(values, np.ndarray)
    x = np.asarray(values, dtype=np.uint64)
    mask = np.uint64((1 << k) - 1)
    kk = np.uint64(k)
    for mult, xshift, rot in key.round_keys:
        x = (x * np.uint64(mult)) & mask  # odd multiplier: invertible mod 2^k
        if xshift:
            x = x ^ (x >> np.uint64(xshift))
        if rot:
            r = np.uint64(rot)
            x = ((x << r) | (x >> (kk - r))) & mask
    return int(x) if scalar else x


def scramble_edges(edges: np.ndarray, key: ScrambleKey) -> np.ndarray:
    """Scramble both endpoints of an (m, 2) edge array."""
    return scramble(edges, key)


def dedup_local(
    edges: np.ndarray,
    row_range: tuple[int, int] | None = None,
    col_range: tuple[int, int] | None = None,
) -> np.ndarray:
    """Drop duplicate edges within one block or tile, keeping first occurrences.

    Order is otherwise preserved.  When row_range/col_range (half-open)
    are declared, every edge must fall inside them; the ranges exist so a
    caller deduplicating tile by tile notices edges that leaked into the
    wrong batch, which would make local dedup unsound globally.
    """
    if row_range is not None and len(edges):
        lo, hi = row_range
        if int(edges[:, 0].min()) < lo or int(edges[:, 0].max()) >= hi:
            raise EdgeOutsideDeclaredTile(f"row outside [{lo}, {hi})")
    if col_range is not None and len(edges):
        lo, hi = col_range
        if int(edges[:, 1].min()) < lo or int(edges[:, 1].max()) >= hi:
            raise EdgeOutsideDeclaredTile(f"col outside [{lo}, {hi})")
    if len(edges) == 0:
        return edges.copy()
    pairs = np.ascontiguousarray(edges).view([("u", edges.dtype), ("v", edges.dtype)]).ravel()
    _, first = np.unique(pairs, return_index=True)
    first.sort()
    return edges[first]
