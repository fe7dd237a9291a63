"""Edge emission: turning sampled fragments into batches of R-MAT edges.

The emission loop appends each sampled fragment's row and column bits to
a pair of accumulators and extracts an edge whenever k bits have piled
up.  `emit_block` is the vectorized form used by `generate`; the
module-private reference emitter spells out the same loop one fragment
at a time around an explicit EdgeEmitState, and the test suite keeps the
two bit-identical.  `naive_edge` / `naive_edges` implement the textbook
one-draw-per-level generator that serves as the statistical oracle and
the performance baseline.

Every block of edges comes from its own random stream, keyed by
(seed, block_index), so any block can be produced on any worker in any
order with identical results.
"""

from __future__ import annotations

import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._rng import DOMAIN_BLOCK, DOMAIN_ORACLE, keyed_stream, raw_words
from .alias import alias_sample
from .params import MAX_K, BadExponent, RmatParams
from .table import FragmentTable

DEFAULT_BLOCK_SIZE = 1 << 16

#: Widest per-edge fragment window the two-dimensional fixed-depth kernel
#: will materialize; wider windows fall through to the general kernel.
_MAX_WINDOW = 16

_ONE = np.uint64(1)
_MASK32 = np.uint64(0xFFFFFFFF)


class Edge(NamedTuple):
    u: int
    v: int


@dataclass
class EdgeEmitState:
    """Accumulator state of the scalar emission loop.

    row_acc and col_acc hold the not-yet-emitted bits with the oldest
    (first sampled) bits in the most significant positions; acc_len is
    how many bits each holds.  Plain Python ints: a deep fragment landing
    on a nearly full accumulator can push acc_len to k - 1 + max_depth,
    past one machine word.
    """

    row_acc: int = 0
    col_acc: int = 0
    acc_len: int = 0


@dataclass(frozen=True)
class GenConfig:
    """Everything `generate` needs: distribution, table, size, seeding."""

    params: RmatParams
    table: FragmentTable
    edge_count: int
    seed: int
    block_size: int = DEFAULT_BLOCK_SIZE
    threads: int = 1

    def __post_init__(self) -> None:
        if not 0 <= self.edge_count < 1 << 63:
            raise ValueError(f"edge_count must be in [0, 2**63), got {self.edge_count}")
        if self.block_size < 1:
            raise ValueError(f"block_size must be >= 1, got {self.block_size}")
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")


@dataclass(frozen=True)
class GenResult:
    """Edges plus the sampling-cost counter the benchmarks report."""

    edges: np.ndarray  # (m, 2) uint64
    samples_consumed: int


@dataclass(frozen=True)
class _Compiled:
    """Table arrays rearranged for the vectorized kernels.

    thr32 holds the alias thresholds rescaled to 32-bit integers: the
    acceptance test `frac < threshold` is decided as
    (word & 0xffffffff) < ceil(threshold * 2**32), which is exact because
    threshold * 2**32 is a power-of-two scaling and never rounds.
    Indices are intp and bit strings use the narrowest sufficient width,
    keeping the gather stage cache-friendly.
    """

    thr32: np.ndarray
    alias: np.ndarray  # intp
    depths: np.ndarray
    row_bits: np.ndarray
    col_bits: np.ndarray
    packed: np.ndarray | None  # (row_bits << 32) | col_bits when depths fit
    size: int
    index_mask: np.uint64 | None  # set when size is a power of two
    fixed_depth: int | None  # set when every entry has the same depth
    mean_depth: float


def _compile(table: FragmentTable) -> _Compiled:
    n = len(table)
    dmin = int(table.depths.min())
    dmax = int(table.depths.max())
    narrow = np.uint16 if dmax <= 16 else np.uint32 if dmax <= 32 else np.uint64
    return _Compiled(
        thr32=np.ceil(table.sampler.threshold * 2.0**32).astype(np.uint64),
        alias=table.sampler.alias.astype(np.intp),
        depths=table.depths,
        row_bits=table.row_bits.astype(narrow),
        col_bits=table.col_bits.astype(narrow),
        packed=(table.row_bits << np.uint64(32)) | table.col_bits if dmax <= 32 else None,
        size=n,
        index_mask=np.uint64(n - 1) if n & (n - 1) == 0 else None,
        fixed_depth=dmin if dmin == dmax else None,
        mean_depth=table.mean_depth,
    )


def _select(comp: _Compiled, raw: np.ndarray) -> np.ndarray:
    # One 64-bit word per sample: high half picks the bucket, low half is
    # the acceptance fraction.
    idx = raw >> np.uint64(32)
    if comp.index_mask is not None:
        idx &= comp.index_mask
    else:
        idx %= np.uint64(comp.size)
    idx = idx.astype(np.intp)
    return np.where((raw & _MASK32) < comp.thr32[idx], idx, comp.alias[idx])


def _fixed_plan(k: int, l: int) -> tuple[int, int, list[list[tuple[int, int, int]]]]:
    """Static piece layout for a fixed-depth table.

    The fragment/edge alignment repeats every lcm(k, l) bits, i.e. every
    ge = l/gcd edges and gf = k/gcd fragments.  Within one period, edge j
    takes a fixed field from each fragment column it overlaps, so each
    piece is (column, net shift, mask-after-shift) with scalar values.
    """
    g = k * l // np.gcd(k, l)
    ge, gf = g // k, g // l
    plan: list[list[tuple[int, int, int]]] = []
    for j in range(ge):
        es, ee = j * k, (j + 1) * k
        pieces = []
        for c in range(es // l, (ee - 1) // l + 1):
            fs = c * l
            hi = min(fs + l, ee)
            width = hi - max(fs, es)
            drop = fs + l - hi  # right shift aligning the field at bit 0
            place = ee - hi  # left shift into the edge's bit position
            pieces.append((c, place - drop, ((1 << width) - 1) << place))
        plan.append(pieces)
    return ge, gf, plan


def _emit_fixed(comp: _Compiled, k: int, count: int, gen) -> tuple[np.ndarray, int]:
    """Kernel for tables where every fragment has the same depth.

    Geometry is periodic, so the block is reshaped into rows of ge edges
    fed by gf fragments, and every piece becomes one scalar shift-and-mask
    over a contiguous fragment column.  No per-element index arithmetic
    survives into the hot loop.
    """
    l = comp.fixed_depth
    assert l is not None
    ge, gf, plan = _fixed_plan(k, l)
    nsuper = (count + ge - 1) // ge
    nf = (count * k + l - 1) // l  # minimal cover; the pad words below
    sel = _select(comp, raw_words(gen, nsuper * gf))  # are never observable

    if comp.packed is not None and k <= 32:
        # Row bits ride in the high 32-bit lane and column bits in the low
        # lane of one word.  Drop and place shifts are identical for the
        # two sides of a piece, so one shift-mask-or serves both; bits
        # bleeding across the lane boundary are removed by the mask.
        frag = comp.packed[sel].reshape(nsuper, gf).T.copy()
        out = np.empty((nsuper, ge), dtype=np.uint64)
        for j, pieces in enumerate(plan):
            c, s, mask = pieces[0]
            m = np.uint64((mask << 32) | mask)
            sh = np.uint64(abs(s))
            acc = ((frag[c] << sh) if s >= 0 else (frag[c] >> sh)) & m
            for c, s, mask in pieces[1:]:
                m = np.uint64((mask << 32) | mask)
                sh = np.uint64(abs(s))
                acc |= ((frag[c] << sh) if s >= 0 else (frag[c] >> sh)) & m
            out[:, j] = acc
        flat = out.reshape(-1)[:count]
        edges = np.empty((count, 2), dtype=np.uint64)
        edges[:, 0] = flat >> np.uint64(32)
        edges[:, 1] = flat & _MASK32
        return edges, nf

    # One gather per fragment, then transpose so each of the gf fragment
    # columns is contiguous; widening to uint64 rides along for free.
    rows = comp.row_bits[sel].reshape(nsuper, gf).T.astype(np.uint64)
    cols = comp.col_bits[sel].reshape(nsuper, gf).T.astype(np.uint64)

    u = np.empty((nsuper, ge), dtype=np.uint64)
    v = np.empty((nsuper, ge), dtype=np.uint64)
    for j, pieces in enumerate(plan):
        c, s, mask = pieces[0]
        m = np.uint64(mask)
        sh = np.uint64(abs(s))
        acc_u = ((rows[c] << sh) if s >= 0 else (rows[c] >> sh)) & m
        acc_v = ((cols[c] << sh) if s >= 0 else (cols[c] >> sh)) & m
        for c, s, mask in pieces[1:]:
            m = np.uint64(mask)
            sh = np.uint64(abs(s))
            acc_u |= ((rows[c] << sh) if s >= 0 else (rows[c] >> sh)) & m
            acc_v |= ((cols[c] << sh) if s >= 0 else (cols[c] >> sh)) & m
        u[:, j] = acc_u
        v[:, j] = acc_v

    edges = np.empty((count, 2), dtype=np.uint64)
    edges[:, 0] = u.reshape(-1)[:count]
    edges[:, 1] = v.reshape(-1)[:count]
    return edges, nf


def _emit_general(comp: _Compiled, k: int, count: int, gen) -> tuple[np.ndarray, int]:
    """Kernel for arbitrary (variable-depth) tables.

    Samples fragments until their depths cover count*k bits, then splits
    each fragment at the k-bit edge boundaries it straddles.  Each piece
    contributes one masked, shifted field to exactly one edge, and a
    segmented sum over pieces assembles the edges.
    """
    needed = count * k
    sels: list[np.ndarray] = []
    short = needed
    while short > 0:
        # Overshooting the estimate is harmless: the random stream is
        # counter-based, so unused tail words never influence anything.
        want = int(short / comp.mean_depth * 1.05) + 16
        sel = _select(comp, raw_words(gen, want))
        sels.append(sel)
        short -= int(comp.depths[sel].sum())
    sel = sels[0] if len(sels) == 1 else np.concatenate(sels)

    csum = np.cumsum(comp.depths[sel])
    nf = int(np.searchsorted(csum, needed, side="left")) + 1
    sel = sel[:nf]
    d = comp.depths[sel]
    end = np.minimum(csum[:nf], np.uint64(needed))  # clamp: tail bits unused
    start = csum[:nf] - d

    kk = np.uint64(k)
    j0 = start // kk  # first edge a fragment touches
    j1 = (end - _ONE) // kk  # last edge a fragment touches
    npieces = (j1 - j0 + _ONE).astype(np.intp)
    total = int(npieces.sum())
    fi = np.repeat(np.arange(nf, dtype=np.intp), npieces)
    first = np.zeros(nf, dtype=np.uint64)
    np.cumsum(npieces[:-1], dtype=np.uint64, out=first[1:])
    pe = j0[fi] + (np.arange(total, dtype=np.uint64) - np.repeat(first, npieces))

    s_f = start[fi]
    e_f = end[fi]
    lo = np.maximum(s_f, pe * kk)
    hi = np.minimum(e_f, (pe + _ONE) * kk)
    mask = (_ONE << (hi - lo)) - _ONE
    drop = (s_f + d[fi]) - hi
    place = (pe + _ONE) * kk - hi

    rbs = comp.row_bits[sel]
    cbs = comp.col_bits[sel]
    # Every edge owns at least one piece and pe is non-decreasing, so the
    # segment boundaries are exactly the positions where pe steps up.
    bounds = np.empty(count, dtype=np.intp)
    bounds[0] = 0
    bounds[1:] = np.flatnonzero(pe[1:] != pe[:-1]) + 1
    edges = np.empty((count, 2), dtype=np.uint64)
    edges[:, 0] = np.add.reduceat(((rbs[fi] >> drop) & mask) << place, bounds)
    edges[:, 1] = np.add.reduceat(((cbs[fi] >> drop) & mask) << place, bounds)
    return edges, nf


def _emit(comp: _Compiled, k: int, count: int, gen) -> tuple[np.ndarray, int]:
    if count == 0:
        return np.empty((0, 2), dtype=np.uint64), 0
    if comp.fixed_depth is not None and (k - 1) // comp.fixed_depth + 2 <= _MAX_WINDOW:
        return _emit_fixed(comp, k, count, gen)
    return _emit_general(comp, k, count, gen)


def _check_k(k: int) -> None:
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool) or not 1 <= k <= MAX_K:
        raise BadExponent(f"k must be an integer in [1, {MAX_K}], got {k!r}")


def emit_block(
    table: FragmentTable, k: int, count: int, stream_key: tuple[int, int]
) -> np.ndarray:
    """One block of `count` edges from the stream named by stream_key.

    stream_key is (seed, block_index).  The accumulators start empty and
    bits left over after the last edge are discarded, so blocks are
    independent of each other and of who generates them.
    """
    _check_k(k)
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    seed, block_index = stream_key
    gen = keyed_stream(int(seed), DOMAIN_BLOCK, int(block_index))
    edges, _ = _emit(_compile(table), int(k), int(count), gen)
    return edges


def _emit_reference(
    table: FragmentTable, k: int, count: int, stream_key: tuple[int, int]
) -> tuple[np.ndarray, int]:
    """Scalar mirror of emit_block, one fragment at a time.

    Consumes the identical word stream and must produce bit-identical
    edges; it exists so the vectorized kernels have something honest to
    be compared against.
    """
    seed, block_index = stream_key
    gen = keyed_stream(int(seed), DOMAIN_BLOCK, int(block_index))
    n = len(table)
    out = np.empty((count, 2), dtype=np.uint64)
    st = EdgeEmitState()
    emitted = 0
    samples = 0
    while emitted < count:
        w = int(raw_words(gen, 1)[0])
        e = int(alias_sample(table.sampler, ((w >> 32) % n, (w & 0xFFFFFFFF) * 2.0**-32)))
        samples += 1
        d = int(table.depths[e])
        st.row_acc = (st.row_acc << d) | int(table.row_bits[e])
        st.col_acc = (st.col_acc << d) | int(table.col_bits[e])
        st.acc_len += d
        while st.acc_len >= k and emitted < count:
            over = st.acc_len - k
            out[emitted, 0] = (st.row_acc >> over) & ((1 << k) - 1)
            out[emitted, 1] = (st.col_acc >> over) & ((1 << k) - 1)
            st.row_acc &= (1 << over) - 1
            st.col_acc &= (1 << over) - 1
            st.acc_len = over
            emitted += 1
    return out, samples


def naive_edge(params: RmatParams, k: int, rng: np.random.Generator) -> Edge:
    """One edge by the plain recursive process: one uniform per level."""
    a, b, c, _ = params.quadrants
    t1, t2, t3 = a, a + b, a + b + c
    u = v = 0
    for _ in range(k):
        r = rng.random()
        digit = int(r >= t1) + int(r >= t2) + int(r >= t3)
        u = (u << 1) | (digit >> 1)
        v = (v << 1) | (digit & 1)
    return Edge(u, v)


def naive_edges(
    params: RmatParams,
    k: int,
    count: int,
    rng: np.random.Generator | int,
    chunk: int = 1 << 16,
) -> np.ndarray:
    """Bulk form of naive_edge, vectorized in chunks of `chunk` edges."""
    _check_k(k)
    if isinstance(rng, (int, np.integer)):
        rng = keyed_stream(int(rng), DOMAIN_ORACLE, 0)
    a, b, c, _ = params.quadrants
    t1, t2, t3 = a, a + b, a + b + c
    w = _ONE << np.arange(k - 1, -1, -1, dtype=np.uint64)
    out = np.empty((count, 2), dtype=np.uint64)
    pos = 0
    while pos < count:
        n = min(chunk, count - pos)
        r = rng.random((n, k))
        digit = (r >= t1).view(np.uint8) + (r >= t2).view(np.uint8) + (r >= t3).view(np.uint8)
        out[pos : pos + n, 0] = ((digit >> 1) * w).sum(axis=1)
        out[pos : pos + n, 1] = ((digit & 1) * w).sum(axis=1)
        pos += n
    return out


def _block_ranges(nblocks: int, parts: int) -> list[tuple[int, int]]:
    base, extra = divmod(nblocks, parts)
    ranges = []
    lo = 0
    for i in range(parts):
        hi = lo + base + (1 if i < extra else 0)
        if hi > lo:
            ranges.append((lo, hi))
        lo = hi
    return ranges


_WSTATE: tuple | None = None


def _worker_init(table: FragmentTable, k: int, seed: int, block_size: int, m: int) -> None:
    global _WSTATE
    _WSTATE = (_compile(table), k, seed, block_size, m)


def _run_range(comp, k, seed, block_size, m, lo, hi):
    parts = []
    samples = 0
    for b in range(lo, hi):
        count = min(block_size, m - b * block_size)
        eb, s = _emit(comp, k, count, keyed_stream(seed, DOMAIN_BLOCK, b))
        parts.append(eb)
        samples += s
    return np.concatenate(parts), samples


def _worker_run(block_range: tuple[int, int]):
    assert _WSTATE is not None
    comp, k, seed, block_size, m = _WSTATE
    return _run_range(comp, k, seed, block_size, m, *block_range)


def generate_result(config: GenConfig) -> GenResult:
    """Generate config.edge_count edges; returns them with sample counts.

    Output is in block-major order and is a pure function of
    (seed, table, k, edge_count, block_size); the thread count changes
    only who computes each block, never the bytes.
    """
    m = config.edge_count
    B = config.block_size
    k = config.params.k
    _check_k(k)
    nblocks = (m + B - 1) // B
    if config.threads == 1 or nblocks <= 1:
        comp = _compile(config.table)
        edges = np.empty((m, 2), dtype=np.uint64)
        samples = 0
        for b in range(nblocks):
            count = min(B, m - b * B)
            eb, s = _emit(comp, k, count, keyed_stream(config.seed, DOMAIN_BLOCK, b))
            edges[b * B : b * B + count] = eb
            samples += s
        return GenResult(edges, samples)

    ranges = _block_ranges(nblocks, config.threads)
    methods = multiprocessing.get_all_start_methods()
    ctx = multiprocessing.get_context("fork" if "fork" in methods else None)
    with ProcessPoolExecutor(
        max_workers=len(ranges),
        mp_context=ctx,
        initializer=_worker_init,
        initargs=(config.table, k, config.seed, B, m),
    ) as pool:
        parts = list(pool.map(_worker_run, ranges))
    edges = np.concatenate([p for p, _ in parts])
    return GenResult(edges, sum(s for _, s in parts))


def generate(config: GenConfig) -> np.ndarray:
    """Generate config.edge_count edges as a (m, 2) uint64 array."""
    return generate_result(config).edges
