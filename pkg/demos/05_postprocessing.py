"""
From raw edge stream to usable graph
====================================

Three constant-time-per-edge stages turn the raw stream into what a
benchmark consumer usually wants: mirror each edge into the lower
triangle for an undirected graph, scramble node IDs so structure no
longer correlates with ID value, and drop duplicate edges.  Everything
is a pure function, so the stages compose in any order that makes sense.
"""

import numpy as np

from rmatgen import (
    GRAPH500,
    build_variable_table,
    dedup_local,
    degree_stats,
    emit_block,
    make_scramble_key,
    scramble,
    scramble_edges,
    to_undirected,
    validate,
)

k, m, seed = 16, 10**6, 11
params = validate(*GRAPH500, k)
edges = emit_block(build_variable_table(params, 1021), k, m, (seed, 0))
print(f"raw stream: {len(edges):,} edges on 2^{k} nodes")

und = to_undirected(edges)
print(f"undirected: all edges now have u >= v: {bool(np.all(und[:, 0] >= und[:, 1]))}")

unique = dedup_local(und)
print(f"dedup:      {len(und) - len(unique):,} duplicate edges removed, "
      f"{len(unique):,} remain")

key = make_scramble_key(seed, k)
hidden = scramble_edges(unique, key)
# 0 stays 0: multiply, xor-shift, and rotate all fix zero
print(f"scramble:   node 1 now appears as {scramble(1, key)}, "
      f"node 2 as {scramble(2, key)}, node 0 stays {scramble(0, key)}\n")

# scrambling relabels nodes but cannot change how skewed the degrees are
for label, e in [("before scramble", unique), ("after scramble", hidden)]:
    d = degree_stats(e, k)
    print(f"{label}: max out-degree {d.max_degree}, "
          f"{d.isolated:,} isolated nodes")

d = degree_stats(hidden, k)
print("\nout-degree histogram (log2 buckets):")
buckets = {}
for deg, cnt in zip(d.degrees.tolist(), d.node_counts.tolist()):
    if deg >= 1:
        buckets[int(deg).bit_length() - 1] = buckets.get(int(deg).bit_length() - 1, 0) + cnt
for b in sorted(buckets):
    print(f"  degree {1 << b:5d}..{(2 << b) - 1:5d}: {'#' * max(1, buckets[b].bit_length())} {buckets[b]}")
