"""Communication-free partitioned generation over a tile grid.

The adjacency matrix is cut into 2^t x 2^t square tiles.  Every part
re-derives the number of edges in each tile it owns by walking a 4-ary
recursion whose multinomial splits are keyed by (seed, recursion path):
identical inputs give identical counts everywhere, so no messages are
needed.  Tiles are then filled locally by the fast emission loop running
on the remaining k - t index bits, keyed by (seed, tile coordinates).

Parts own contiguous ranges of tile rows and prune recursion subtrees
whose rows they do not own, so planning work scales with owned rows, not
with the whole grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import DOMAIN_NODE, DOMAIN_TILE, keyed_stream
from .generator import _compile, _emit
from .params import RmatParams
from .postprocess import dedup_local
from .table import FragmentTable

#: Tile coordinates are packed into one 64-bit stream key as (row << t) | col.
MAX_TILE_BITS = 31


class CountOverflowsTile(ValueError):
    """Distinct-edge mode asked for more edges than the tile has cells."""


@dataclass(frozen=True)
class TileCount:
    tile_row: int
    tile_col: int
    count: int


@dataclass(frozen=True)
class PartitionPlan:
    """Grid geometry plus the deterministic inputs every part shares.

    owner_rows assigns each part a contiguous, half-open range of tile
    rows; the ranges must tile [0, 2^t) exactly.
    """

    k: int
    t: int
    m: int
    seed: int
    owner_rows: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not 0 <= self.t <= min(self.k, MAX_TILE_BITS):
            raise ValueError(f"t must be in [0, min(k, {MAX_TILE_BITS})], got {self.t}")
        if self.m < 0:
            raise ValueError(f"m must be >= 0, got {self.m}")
        rows = 1 << self.t
        pos = 0
        for lo, hi in self.owner_rows:
            if lo != pos or hi < lo:
                raise ValueError(f"owner_rows must tile [0, {rows}) contiguously")
            pos = hi
        if pos != rows:
            raise ValueError(f"owner_rows must cover [0, {rows}), stop at {pos}")


def default_plan(k: int, t: int, m: int, seed: int, parts: int = 1) -> PartitionPlan:
    """Plan with tile rows dealt to `parts` in near-equal contiguous runs."""
    if parts < 1:
        raise ValueError(f"parts must be >= 1, got {parts}")
    rows = 1 << t
    base, extra = divmod(rows, parts)
    ranges = []
    lo = 0
    for i in range(parts):
        hi = lo + base + (1 if i < extra else 0)
        ranges.append((lo, hi))
        lo = hi
    return PartitionPlan(k=k, t=t, m=m, seed=seed, owner_rows=tuple(ranges))


def split_quadrant_counts(
    count: int, params: RmatParams, node_key: tuple[int, int]
) -> tuple[int, int, int, int]:
    """Multinomial split of `count` edges over the four quadrants.

    Three sequential binomials: n_a ~ Bin(count, a), then n_b and n_c from
    the renormalized remainders, n_d as what is left.  The conditional
    probabilities are computed as b/(b+c+d) and c/(c+d) rather than the
    algebraically equal b/(1-a) and c/(1-a-b), which can land one ulp
    above 1 and be rejected by the sampler.  All randomness comes from the
    stream keyed by node_key = (seed, recursion path), so any two parts
    evaluating the same node get the same tuple.
    """
    if count == 0:
        return (0, 0, 0, 0)
    seed, path = node_key
    gen = keyed_stream(seed, DOMAIN_NODE, path)
    a, b, c, d = params.quadrants
    n_a = int(gen.binomial(count, a))
    rest = count - n_a
    n_b = int(gen.binomial(rest, b / (b + c + d)))
    rest -= n_b
    n_c = int(gen.binomial(rest, c / (c + d)))
    return (n_a, n_b, n_c, rest - n_c)


def plan_tiles(plan: PartitionPlan, params: RmatParams, part: int = 0) -> list[TileCount]:
    """Edge counts for every tile owned by `part`, zero-count tiles included.

    Walks the recursion tree from the whole matrix down to single tiles,
    splitting counts at each node and pruning subtrees whose tile rows lie
    outside the part's range.  The recursion path is encoded as the
    interleaved digit string with a leading 1 sentinel, so distinct nodes
    always key distinct streams.
    """
    lo, hi = plan.owner_rows[part]
    out: list[TileCount] = []

    def rec(level: int, row0: int, col0: int, code: int, count: int) -> None:
        if level == plan.t:
            out.append(TileCount(tile_row=row0, tile_col=col0, count=count))
            return
        half = 1 << (plan.t - level - 1)
        splits = split_quadrant_counts(count, params, (plan.seed, code))
        for digit, n in enumerate(splits):
            r0 = row0 + (digit >> 1) * half
            if r0 + half <= lo or r0 >= hi:
                continue
            rec(level + 1, r0, col0 + (digit & 1) * half, (code << 2) | digit, n)

    rec(0, 0, 0, 1, plan.m)
    return out


def _tile_result(
    comp, row: int, col: int, count: int, k: int, t: int, seed: int, distinct: bool
) -> tuple[np.ndarray, int]:
    """Emit one tile from a precompiled table; also count alias samples."""
    inner = k - t
    if distinct and count > 4**inner:
        raise CountOverflowsTile(f"{count} distinct edges cannot fit {4**inner} cells")
    if inner == 0:
        edges = np.empty((count, 2), dtype=np.uint64)
        edges[:, 0] = row
        edges[:, 1] = col
        return edges, 0

    gen = keyed_stream(seed, DOMAIN_TILE, (row << t) | col)
    edges, samples = _emit(comp, inner, count, gen)
    if distinct:
        edges = dedup_local(edges)
        while len(edges) < count:
            more, extra = _emit(comp, inner, count - len(edges), gen)
            samples += extra
            edges = dedup_local(np.concatenate([edges, more]))
    edges[:, 0] |= np.uint64(row << inner)
    edges[:, 1] |= np.uint64(col << inner)
    return edges, samples


def generate_tile(
    tile: TileCount | tuple[int, int],
    count: int,
    params: RmatParams,
    table: FragmentTable,
    k: int,
    t: int,
    seed: int,
    distinct: bool = False,
) -> np.ndarray:
    """Generate `count` edges inside one tile.

    The tile prefix fixes the top t bits of both endpoints; the remaining
    k - t bits come from the standard emission loop, whose self-similar
    recursion makes the conditional in-tile distribution equal to a
    2^(k-t)-node R-MAT process.  With distinct=True, duplicate cells are
    resampled from the same stream until all edges are distinct.
    """
    if isinstance(tile, TileCount):
        row, col = tile.tile_row, tile.tile_col
    else:
        row, col = tile
    if not 0 <= t <= min(k, MAX_TILE_BITS):
        raise ValueError(f"t must be in [0, min(k, {MAX_TILE_BITS})], got {t}")
    if not (0 <= row < 1 << t and 0 <= col < 1 << t):
        raise ValueError(f"tile ({row}, {col}) outside the 2^{t} grid")
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    edges, _ = _tile_result(_compile(table), row, col, count, k, t, seed, distinct)
    return edges


def generate_part(
    plan: PartitionPlan,
    params: RmatParams,
    table: FragmentTable,
    part: int = 0,
    distinct: bool = False,
) -> tuple[np.ndarray, list[TileCount], int]:
    """All edges of one part, tile by tile.

    Returns (edges, tile counts, alias samples consumed).  The table is
    compiled once and reused across tiles.
    """
    tiles = plan_tiles(plan, params, part)
    comp = _compile(table)
    chunks = []
    samples = 0
    for tc in tiles:
        edges, used = _tile_result(
            comp, tc.tile_row, tc.tile_col, tc.count, plan.k, plan.t, plan.seed, distinct
        )
        chunks.append(edges)
        samples += used
    if chunks:
        return np.concatenate(chunks), tiles, samples
    return np.empty((0, 2), dtype=np.uint64), tiles, samples
