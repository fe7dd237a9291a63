"""Fast R-MAT random graph generation via precomputed recursion-path fragments.

The generator draws whole fragments of the R-MAT recursion from an alias
table instead of descending one level at a time, giving amortized constant
work per edge.  Deterministic keyed random streams make parallel and
partitioned generation reproducible and communication-free.

Typical use:

    from rmatgen import validate, build_variable_table, GenConfig, generate

    params = validate(0.57, 0.19, 0.19, 0.05, k=20)
    table = build_variable_table(params, 8191)
    edges = generate(GenConfig(params=params, table=table,
                               edge_count=10**6, seed=1))
"""

from .alias import AliasTable, alias_sample, build_alias
from .generator import (
    DEFAULT_BLOCK_SIZE,
    Edge,
    GenConfig,
    GenResult,
    emit_block,
    generate,
    generate_result,
    naive_edge,
    naive_edges,
)
from .params import (
    GRAPH500,
    MAX_K,
    BadExponent,
    NegativeOrZeroWeight,
    RmatParams,
    SumOutOfTolerance,
    entropy,
    speedup_bound,
    validate,
)
from .partition import (
    MAX_TILE_BITS,
    CountOverflowsTile,
    PartitionPlan,
    TileCount,
    default_plan,
    generate_part,
    generate_tile,
    plan_tiles,
    split_quadrant_counts,
)
from .postprocess import (
    EdgeOutsideDeclaredTile,
    ScrambleKey,
    dedup_local,
    make_scramble_key,
    mirrored,
    scramble,
    scramble_edges,
    to_undirected,
)
from .stats import (
    MAX_ENUM_K,
    CellHistogram,
    ChiSquareResult,
    DegreeStats,
    KTooLargeForEnumeration,
    SampleTooSmall,
    cell_histogram,
    chi_square,
    chi_square_quantile,
    degree_stats,
    exact_cell_probs,
    pool_small_cells,
)
from .table import (
    DEFAULT_DEPTH_CAP,
    MAX_FIXED_DEPTH,
    DepthOutOfRange,
    FragmentTable,
    NoiseOutOfRange,
    PathEntry,
    SizeLimitTooSmall,
    TableStats,
    build_fixed_table,
    build_variable_table,
    dump_table,
    perturb_table,
    table_stats,
)

__version__ = "0.1.0"

__all__ = [
    "AliasTable", "alias_sample", "build_alias",
    "DEFAULT_BLOCK_SIZE", "Edge", "GenConfig", "GenResult", "emit_block",
    "generate", "generate_result", "naive_edge", "naive_edges",
    "GRAPH500", "MAX_K", "BadExponent", "NegativeOrZeroWeight", "RmatParams",
    "SumOutOfTolerance", "entropy", "speedup_bound", "validate",
    "MAX_TILE_BITS", "CountOverflowsTile", "PartitionPlan", "TileCount",
    "default_plan", "generate_part", "generate_tile", "plan_tiles",
    "split_quadrant_counts",
    "EdgeOutsideDeclaredTile", "ScrambleKey", "dedup_local",
    "make_scramble_key", "mirrored", "scramble", "scramble_edges",
    "to_undirected",
    "MAX_ENUM_K", "CellHistogram", "ChiSquareResult", "DegreeStats",
    "KTooLargeForEnumeration", "SampleTooSmall", "cell_histogram",
    "chi_square", "chi_square_quantile", "degree_stats", "exact_cell_probs",
    "pool_small_cells",
    "DEFAULT_DEPTH_CAP", "MAX_FIXED_DEPTH", "DepthOutOfRange",
    "FragmentTable", "NoiseOutOfRange", "PathEntry", "SizeLimitTooSmall",
    "TableStats", "build_fixed_table", "build_variable_table", "dump_table",
    "perturb_table", "table_stats",
    "__version__",
]
