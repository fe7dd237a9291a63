"""Command-line front end and benchmark harness.

Subcommands:

  generate         write an edge list (binary, text, or none for a dry run)
  verify           chi-square the generator's cell counts against the model
  bench-tablesize  CSV sweep of throughput versus fragment-table size
  bench-threads    CSV sweep of throughput versus worker count
  table-dump       print the fragment table, one entry per line

Exit codes: 0 on success, 1 when `verify` reports a failing verdict, 2 on
configuration or I/O errors.  Output files are written to a temp path and
renamed into place, so a failed run leaves no partial file behind.
"""

from __future__ import annotations

import argparse
import math
import os
import statistics
import sys
import time
from dataclasses import dataclass

import numpy as np

from .generator import DEFAULT_BLOCK_SIZE, GenConfig, generate_result
from .params import GRAPH500, RmatParams, validate
from .partition import default_plan, generate_part
from .postprocess import dedup_local, make_scramble_key, scramble_edges, to_undirected
from .stats import MAX_ENUM_K, cell_histogram, chi_square, exact_cell_probs, pool_small_cells
from .table import (
    DEFAULT_DEPTH_CAP,
    FragmentTable,
    build_fixed_table,
    build_variable_table,
    dump_table,
    perturb_table,
)

#: Default worker count when --threads is absent.
THREADS_ENV = "RMAT_THREADS"

TABLESIZE_HEADER = "size,kind,edges_per_sec,samples_per_edge,expected_depth"
THREADS_HEADER = "threads,edges_per_sec,speedup_vs_1"


class InvalidConfig(ValueError):
    """Mutually inconsistent or out-of-range command-line options."""


@dataclass(frozen=True)
class RunConfig:
    """Validated options for one CLI invocation."""

    subcommand: str
    a: float
    b: float
    c: float
    d: float
    k: int
    m: int
    seed: int
    kind: str  # fixed | variable
    depth: int | None
    size: int | None
    depth_cap: int
    undirected: bool
    scramble: bool
    dedup: bool
    tiles: int | None
    parts: int | None
    part: int | None
    out: str | None
    fmt: str  # binary | text | none
    threads: int
    sizes: tuple[int, ...] = ()
    thread_list: tuple[int, ...] = ()
    reps: int = 3
    noise: float = 0.0


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise InvalidConfig(f"{THREADS_ENV}={raw!r} is not an integer")
    if n < 1:
        raise InvalidConfig(f"{THREADS_ENV} must be >= 1, got {n}")
    return n


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    """Cross-field validation that argparse cannot express."""
    kind = getattr(ns, "table", "variable")
    depth = getattr(ns, "depth", None)
    size = getattr(ns, "size", None)
    if ns.subcommand == "bench-tablesize":
        pass  # --sizes drives table construction; --depth/--size do not apply
    elif kind == "fixed":
        if depth is None:
            raise InvalidConfig("--table fixed requires --depth")
        if size is not None:
            raise InvalidConfig("--size applies only to --table variable")
    else:
        if depth is not None:
            raise InvalidConfig("--depth applies only to --table fixed")
        if size is None:
            size = 8191

    tiles = getattr(ns, "tiles", None)
    parts = getattr(ns, "parts", None)
    part = getattr(ns, "part", None)
    if part is not None and (parts is None or tiles is None):
        raise InvalidConfig("--part requires --parts and --tiles")
    if parts is not None and tiles is None:
        raise InvalidConfig("--parts requires --tiles")
    if tiles is not None:
        parts = 1 if parts is None else parts
        part = 0 if part is None else part
        if parts < 1:
            raise InvalidConfig(f"--parts must be >= 1, got {parts}")
        if not 0 <= part < parts:
            raise InvalidConfig(f"--part must be in [0, {parts}), got {part}")

    threads = getattr(ns, "threads", None)
    threads = _default_threads() if threads is None else threads
    if threads < 1:
        raise InvalidConfig(f"--threads must be >= 1, got {threads}")

    fmt = getattr(ns, "format", "binary")
    out = getattr(ns, "out", None)
    if ns.subcommand == "generate":
        if fmt == "none" and out is not None:
            raise InvalidConfig("--format none writes nothing; drop -o")
        if fmt != "none" and out is None:
            raise InvalidConfig(f"--format {fmt} requires -o PATH")

    reps = getattr(ns, "reps", 3)
    if reps < 3:
        raise InvalidConfig(f"--reps must be >= 3, got {reps}")

    sizes = getattr(ns, "sizes", ())
    if sizes and list(sizes) != sorted(set(sizes)):
        raise InvalidConfig("--sizes must be strictly ascending")
    thread_list = getattr(ns, "thread_list", ())
    if thread_list:
        if any(n < 1 for n in thread_list):
            raise InvalidConfig("--threads-list entries must be >= 1")
        if 1 not in thread_list:
            raise InvalidConfig("--threads-list must include 1 (the speedup baseline)")

    return RunConfig(
        subcommand=ns.subcommand,
        a=ns.a, b=ns.b, c=ns.c, d=ns.d,
        k=ns.k, m=getattr(ns, "m", 0), seed=ns.seed,
        kind=kind, depth=depth, size=size,
        depth_cap=getattr(ns, "depth_cap", DEFAULT_DEPTH_CAP),
        undirected=getattr(ns, "undirected", False),
        scramble=getattr(ns, "scramble", False),
        dedup=getattr(ns, "dedup", False),
        tiles=tiles, parts=parts, part=part,
        out=out, fmt=fmt, threads=threads,
        sizes=tuple(sizes), thread_list=tuple(thread_list), reps=reps,
        noise=getattr(ns, "noise", 0.0),
    )


def _build_table(config: RunConfig, params: RmatParams) -> FragmentTable:
    if config.kind == "fixed":
        return build_fixed_table(params, config.depth)
    return build_variable_table(params, config.size, depth_cap=config.depth_cap)


def _write_file(path: str, write_body) -> None:
    """Write via a temp file and atomic rename; no partial file on failure."""
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "wb") as f:
            write_body(f)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _write_edges(path: str, fmt: str, edges: np.ndarray) -> None:
    if fmt == "binary":
        # Consecutive (u, v) records of two 64-bit little-endian uints.
        _write_file(path, lambda f: edges.astype("<u8", copy=False).tofile(f))
    else:
        _write_file(path, lambda f: np.savetxt(f, edges, fmt="%d"))


def _write_text(path: str | None, lines: list[str]) -> None:
    body = "".join(line + "\n" for line in lines)
    if path is None:
        sys.stdout.write(body)
    else:
        _write_file(path, lambda f: f.write(body.encode()))


def run_generate(config: RunConfig) -> int:
    params = validate(config.a, config.b, config.c, config.d, config.k)
    if config.undirected and params.b != params.c:
        print(
            f"warning: --undirected with b={params.b!r} != c={params.c!r}; "
            "mirroring skews the marginals unless b == c",
            file=sys.stderr,
        )
    table = _build_table(config, params)

    # Timed region covers edge generation and postprocessing, not table
    # construction or file output.
    t0 = time.perf_counter()
    if config.tiles is not None:
        plan = default_plan(config.k, config.tiles, config.m, config.seed, config.parts)
        edges, _, samples = generate_part(plan, params, table, config.part)
    else:
        res = generate_result(
            GenConfig(
                params=params,
                table=table,
                edge_count=config.m,
                seed=config.seed,
                block_size=DEFAULT_BLOCK_SIZE,
                threads=config.threads,
            )
        )
        edges, samples = res.edges, res.samples_consumed
    generated = len(edges)
    if config.undirected:
        edges = to_undirected(edges)
    if config.dedup:
        edges = dedup_local(edges)
    if config.scramble:
        edges = scramble_edges(edges, make_scramble_key(config.seed, config.k))
    elapsed = max(time.perf_counter() - t0, 1e-9)

    if config.fmt != "none":
        _write_edges(config.out, config.fmt, edges)
    print(
        f"edges={len(edges)} seconds={elapsed:.3f} "
        f"edges_per_sec={generated / elapsed:.0f} samples={samples} "
        f"samples_per_edge={samples / max(generated, 1):.4f}"
    )
    return 0


def run_verify(config: RunConfig) -> int:
    params = validate(config.a, config.b, config.c, config.d, config.k)
    if config.k > MAX_ENUM_K:
        raise InvalidConfig(f"verify enumerates 4^k cells; k must be <= {MAX_ENUM_K}")
    table = _build_table(config, params)
    if config.noise:
        # Inject a controlled table defect; verify should then report fail.
        table = perturb_table(table, config.noise, config.seed)
    res = generate_result(
        GenConfig(
            params=params,
            table=table,
            edge_count=config.m,
            seed=config.seed,
            threads=config.threads,
        )
    )
    hist = cell_histogram(res.edges, config.k)
    probs = exact_cell_probs(params, config.k)
    counts = hist.counts
    if hist.total * float(probs.min()) < 5.0:
        # Pool cells too rare for the classical validity rule (skewed models).
        probs, counts = pool_small_cells(probs, counts)
    result = chi_square(counts, probs)
    verdict = "pass" if result.passed else "fail"
    print(
        f"statistic={result.statistic:.6f} dof={result.dof} "
        f"threshold={result.threshold:.6f} verdict={verdict}"
    )
    return 0 if result.passed else 1


def _median_rate(config: RunConfig, params: RmatParams, table: FragmentTable,
                 threads: int) -> tuple[float, int]:
    """Median edges/s over config.reps timed runs after one warm-up."""
    gc = GenConfig(
        params=params,
        table=table,
        edge_count=config.m,
        seed=config.seed,
        threads=threads,
    )
    generate_result(gc)
    times = []
    samples = 0
    for _ in range(config.reps):
        t0 = time.perf_counter()
        res = generate_result(gc)
        times.append(max(time.perf_counter() - t0, 1e-9))
        samples = res.samples_consumed
    return config.m / statistics.median(times), samples


def run_bench_tablesize(config: RunConfig) -> int:
    params = validate(config.a, config.b, config.c, config.d, config.k)
    if not config.sizes:
        raise InvalidConfig("bench-tablesize requires --sizes")
    rows = [TABLESIZE_HEADER]
    for size in config.sizes:
        if config.kind == "fixed":
            depth = round(math.log(size, 4))
            if 4**depth != size:
                raise InvalidConfig(f"fixed tables need power-of-4 sizes, got {size}")
            table = build_fixed_table(params, depth)
        else:
            table = build_variable_table(params, size, depth_cap=config.depth_cap)
        rate, samples = _median_rate(config, params, table, config.threads)
        if config.kind == "fixed":
            # Arithmetic identity for uniform-depth tables; measurement only
            # adds per-block ceiling noise on top of k/depth.
            spe = config.k / table.max_depth
        else:
            spe = samples / max(config.m, 1)
        rows.append(f"{size},{config.kind},{rate:.3f},{spe:.6f},{table.mean_depth:.6f}")
    _write_text(config.out, rows)
    return 0


def run_bench_threads(config: RunConfig) -> int:
    params = validate(config.a, config.b, config.c, config.d, config.k)
    if not config.thread_list:
        raise InvalidConfig("bench-threads requires --threads-list")
    table = _build_table(config, params)
    rates = {n: _median_rate(config, params, table, n)[0] for n in config.thread_list}
    base = rates[1]
    rows = [THREADS_HEADER]
    for n in config.thread_list:
        rows.append(f"{n},{rates[n]:.3f},{rates[n] / base:.4f}")
    _write_text(config.out, rows)
    return 0


def run_table_dump(config: RunConfig) -> int:
    params = validate(config.a, config.b, config.c, config.d, config.k)
    table = _build_table(config, params)
    _write_text(config.out, list(dump_table(table)))
    return 0


_HANDLERS = {
    "generate": run_generate,
    "verify": run_verify,
    "bench-tablesize": run_bench_tablesize,
    "bench-threads": run_bench_threads,
    "table-dump": run_table_dump,
}


def _add_model_args(p: argparse.ArgumentParser, need_m: bool) -> None:
    p.add_argument("-a", type=float, default=GRAPH500[0], help="quadrant probability a")
    p.add_argument("-b", type=float, default=GRAPH500[1], help="quadrant probability b")
    p.add_argument("-c", type=float, default=GRAPH500[2], help="quadrant probability c")
    p.add_argument("-d", type=float, default=GRAPH500[3], help="quadrant probability d")
    p.add_argument("-k", type=int, required=need_m, default=1,
                   help="index bits; the graph has 2^k nodes")
    if need_m:
        p.add_argument("-m", type=int, required=True, help="number of edges")
    p.add_argument("--seed", type=int, default=1, help="master seed")


def _add_table_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--table", choices=("fixed", "variable"), default="variable",
                   help="fragment table kind (default: variable)")
    p.add_argument("--depth", type=int, help="fragment depth for fixed tables")
    p.add_argument("--size", type=int,
                   help="entry budget for variable tables (default: 8191)")
    p.add_argument("--depth-cap", type=int, default=DEFAULT_DEPTH_CAP, dest="depth_cap",
                   help="maximum fragment depth for variable tables")


def _add_threads_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker count (default: ${THREADS_ENV} or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmat", description="R-MAT graph generation via fragment sampling"
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    g = sub.add_parser("generate", help="generate an edge list")
    _add_model_args(g, need_m=True)
    _add_table_args(g)
    _add_threads_arg(g)
    g.add_argument("--undirected", action="store_true",
                   help="canonicalize each edge to (max, min)")
    g.add_argument("--scramble", action="store_true",
                   help="apply the seeded node-ID permutation")
    g.add_argument("--dedup", action="store_true",
                   help="drop duplicate edges, keeping first occurrences")
    g.add_argument("--tiles", type=int,
                   help="partitioned mode: split the matrix into 2^t x 2^t tiles")
    g.add_argument("--parts", type=int, help="number of parts owning tile rows")
    g.add_argument("--part", type=int, help="which part to generate (0-based)")
    g.add_argument("-o", dest="out", help="output path")
    g.add_argument("--format", choices=("binary", "text", "none"), default="binary",
                   help="binary: u,v pairs of 64-bit LE uints; text: 'u v' lines; "
                        "none: generate and time only")

    v = sub.add_parser("verify", help="chi-square generated cells against the model")
    _add_model_args(v, need_m=True)
    _add_table_args(v)
    _add_threads_arg(v)
    v.add_argument("--noise", type=float, default=0.0,
                   help="perturb table probabilities by this factor before "
                        "generating; nonzero values should make verify fail")

    bt = sub.add_parser("bench-tablesize", help="throughput sweep over table sizes")
    _add_model_args(bt, need_m=True)
    _add_threads_arg(bt)
    bt.add_argument("--sizes", type=_parse_int_list, required=True,
                    help="comma-separated table sizes, ascending")
    bt.add_argument("--kind", choices=("fixed", "variable"), default="variable",
                    dest="table", help="table kind for every row")
    bt.add_argument("--depth-cap", type=int, default=DEFAULT_DEPTH_CAP, dest="depth_cap")
    bt.add_argument("--reps", type=int, default=3, help="timed repetitions (>= 3)")
    bt.add_argument("-o", dest="out", help="CSV path (default: stdout)")

    bn = sub.add_parser("bench-threads", help="throughput sweep over worker counts")
    _add_model_args(bn, need_m=True)
    _add_table_args(bn)
    bn.add_argument("--threads-list", type=_parse_int_list, required=True,
                    dest="thread_list", help="comma-separated worker counts; must include 1")
    bn.add_argument("--reps", type=int, default=3, help="timed repetitions (>= 3)")
    bn.add_argument("-o", dest="out", help="CSV path (default: stdout)")

    td = sub.add_parser("table-dump", help="print fragment table entries")
    _add_model_args(td, need_m=False)
    _add_table_args(td)
    td.add_argument("-o", dest="out", help="output path (default: stdout)")

    return parser


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        config = config_from_args(ns)
        return _HANDLERS[config.subcommand](config)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
