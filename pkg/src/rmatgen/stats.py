"""Statistical verification: exact cell probabilities, chi-square, degrees.

The adjacency matrix of a k-level R-MAT graph has 4^k cells whose exact
probabilities are tiny products of the quadrant weights; this module
enumerates them, histograms generated edges over them, and runs the
Pearson goodness-of-fit test that the test suite and the `verify`
subcommand share.  A degree summary rounds it out.  Everything here is a
pure function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .params import RmatParams

#: Enumerating 4^k cells is only sensible while they fit in memory.
MAX_ENUM_K = 12


class KTooLargeForEnumeration(ValueError):
    """Cell enumeration requested for k beyond the 4^k practicality bound."""


class InvalidExpectedVector(ValueError):
    """Expected probabilities malformed: wrong length, nonpositive, or not summing to 1."""


class SampleTooSmall(ValueError):
    """Too few observations for the smallest expected cell (classical 5-count rule)."""


def _check_enum_k(k: int) -> None:
    if not 1 <= k <= MAX_ENUM_K:
        raise KTooLargeForEnumeration(f"k must be in [1, {MAX_ENUM_K}], got {k}")


@dataclass(frozen=True)
class CellHistogram:
    """Counts of edges per adjacency cell, cell (u, v) at index u*2^k + v."""

    k: int
    counts: np.ndarray
    total: int

    def __post_init__(self) -> None:
        _check_enum_k(self.k)
        if self.counts.shape != (4**self.k,):
            raise ValueError(f"counts must have length 4**{self.k}, got {self.counts.shape}")


def cell_histogram(edges: np.ndarray, k: int) -> CellHistogram:
    """Histogram an (m, 2) edge array over the 4^k adjacency cells."""
    _check_enum_k(k)
    if len(edges) and int(edges.max()) >> k:
        raise ValueError(f"edge endpoints exceed 2**{k} - 1")
    flat = ((edges[:, 0].astype(np.int64) << k) | edges[:, 1].astype(np.int64)).astype(np.intp)
    counts = np.bincount(flat, minlength=4**k)
    return CellHistogram(k=k, counts=counts, total=int(counts.sum()))


def exact_cell_probs(params: RmatParams, k: int) -> np.ndarray:
    """Exact probability of every adjacency cell, index u*2^k + v.

    Each level contributes an independent factor chosen by that level's
    (row bit, col bit), so the 2^k x 2^k probability matrix is the k-fold
    Kronecker power of [[a, b], [c, d]].
    """
    _check_enum_k(k)
    a, b, c, d = params.quadrants
    level = np.array([[a, b], [c, d]], dtype=np.float64)
    return reduce(np.kron, [level] * k).ravel()


def _norm_ppf(p: float) -> float:
    """Inverse standard normal CDF (Acklam's rational approximation).

    Absolute error below 1.2e-9 over (0, 1), far finer than the quantile
    tolerances used here.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
         1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
    B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
         6.680131188771972e+01, -1.328068155288572e+01)
    C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
         -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
    D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
         3.754408661907416e+00)
    p_low = 0.02425
    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) / \
            ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    if p > 1.0 - p_low:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        return -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) / \
            ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    q = p - 0.5
    r = q * q
    return (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q / \
        (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)


def chi_square_quantile(dof: int, upper_tail: float) -> float:
    """Chi-square quantile at probability 1 - upper_tail (Wilson-Hilferty)."""
    z = _norm_ppf(1.0 - upper_tail)
    t = 2.0 / (9.0 * dof)
    return dof * (1.0 - t + z * math.sqrt(t)) ** 3


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    dof: int
    threshold: float
    alpha: float
    passed: bool


def chi_square(
    observed: CellHistogram | np.ndarray,
    expected: np.ndarray,
    alpha: float = 1e-3,
) -> ChiSquareResult:
    """Pearson goodness-of-fit of observed counts against expected probs.

    Requires every expected cell count total*p to clear the classical
    validity rule total >= 5 / min(p); callers with sparse tails should
    pool first (pool_small_cells).
    """
    counts = observed.counts if isinstance(observed, CellHistogram) else np.asarray(observed)
    expected = np.asarray(expected, dtype=np.float64)
    if expected.shape != counts.shape:
        raise InvalidExpectedVector(
            f"expected length {expected.shape} does not match observed {counts.shape}"
        )
    if expected.size < 2 or not np.all(expected > 0.0) or not np.all(np.isfinite(expected)):
        raise InvalidExpectedVector("expected probabilities must be positive and finite")
    if abs(float(expected.sum()) - 1.0) > 1e-6:
        raise InvalidExpectedVector(f"expected probabilities sum to {expected.sum()!r}, not 1")
    total = int(counts.sum())
    if total < 5.0 / float(expected.min()):
        raise SampleTooSmall(
            f"need at least {math.ceil(5.0 / float(expected.min()))} observations "
            f"for the smallest cell, got {total}"
        )
    e = total * expected
    statistic = float((np.square(counts - e) / e).sum())
    dof = expected.size - 1
    threshold = chi_square_quantile(dof, alpha)
    return ChiSquareResult(
        statistic=statistic, dof=dof, threshold=threshold, alpha=alpha,
        passed=statistic < threshold,
    )


def pool_small_cells(
    probs: np.ndarray,
    counts: np.ndarray,
    min_expected: float = 5.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Merge low-expectation cells into one pooled cell.

    Cells whose expected count total*p falls below min_expected are
    combined, smallest first, until the pool itself clears the bar; the
    pooled cell is appended last.  Returns (probs, counts) ready for
    chi_square.  Raises SampleTooSmall if even full pooling cannot reach
    min_expected per cell.
    """
    probs = np.asarray(probs, dtype=np.float64)
    counts = np.asarray(counts)
    total = int(counts.sum())
    order = np.argsort(probs, kind="stable")
    csum = np.cumsum(probs[order]) * total
    expected = probs * total
    # Pool the n smallest cells, where n is the largest count for which the
    # n-th smallest cell is individually short OR the pool is still short.
    short = expected[order] < min_expected
    n_pool = int(short.sum())
    while 0 < n_pool < len(probs) and csum[n_pool - 1] < min_expected:
        n_pool += 1
    if n_pool == 0:
        return probs, counts
    if n_pool >= len(probs):
        raise SampleTooSmall(
            f"pooling all {len(probs)} cells still cannot reach {min_expected} expected"
        )
    pooled = order[:n_pool]
    kept = np.sort(order[n_pool:])
    out_probs = np.append(probs[kept], probs[pooled].sum())
    out_counts = np.append(counts[kept], counts[pooled].sum())
    return out_probs, out_counts


@dataclass(frozen=True)
class DegreeStats:
    """Sparse out-degree summary: node_counts[i] nodes have degree degrees[i]."""

    degrees: np.ndarray
    node_counts: np.ndarray
    max_degree: int
    isolated: int


def degree_stats(edges: np.ndarray, k: int) -> DegreeStats:
    """Out-degree histogram, max out-degree, and isolated-node count.

    A node is isolated when it appears in no edge at all, in either
    position.  The degree-0 bucket counts every node that never occurs
    as a source, which for sparse graphs is nearly all of 2^k, so the
    histogram is returned sparsely.
    """
    n_nodes = 1 << k
    if len(edges) == 0:
        return DegreeStats(
            degrees=np.array([0], dtype=np.uint64),
            node_counts=np.array([n_nodes], dtype=np.uint64),
            max_degree=0,
            isolated=n_nodes,
        )
    _, per_source = np.unique(edges[:, 0], return_counts=True)
    degrees, node_counts = np.unique(per_source, return_counts=True)
    zero_sources = n_nodes - len(per_source)
    if zero_sources:
        degrees = np.append(np.uint64(0), degrees.astype(np.uint64))
        node_counts = np.append(np.uint64(zero_sources), node_counts.astype(np.uint64))
    touched = len(np.union1d(edges[:, 0], edges[:, 1]))
    return DegreeStats(
        degrees=degrees.astype(np.uint64),
        node_counts=node_counts.astype(np.uint64),
        max_degree=int(per_source.max()),
        isolated=n_nodes - touched,
    )
