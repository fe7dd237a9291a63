"""
Inside a fragment table
=======================

The sampler's speed comes from a precomputed table of recursion-path
fragments: each entry is a (row bits, col bits, probability) triple, and
one alias-method draw advances several recursion levels at once.  Fixed
tables hold every path of one depth; variable tables grow the most
probable paths deeper, which squeezes more levels out of each draw for
skewed models.
"""

from rmatgen import (
    GRAPH500,
    build_fixed_table,
    build_variable_table,
    dump_table,
    entropy,
    speedup_bound,
    table_stats,
    validate,
)

params = validate(*GRAPH500, 20)

print(f"quadrant entropy H = {entropy(params):.4f} bits/level")
print(f"variable-over-fixed speedup bound 2/H = {speedup_bound(params):.4f}\n")

fixed = build_fixed_table(params, 2)
print(f"fixed table, depth 2: {len(fixed)} entries, all depth {fixed.max_depth}")
for line in list(dump_table(fixed))[:4]:
    print("  " + line)
print("  ...")

for size in (253, 1021, 8191):
    table = build_variable_table(params, size)
    s = table_stats(table)
    print(f"\nvariable table, S={size}: {s.entry_count} entries, "
          f"depths up to {table.max_depth}")
    print(f"  expected depth per draw  {s.expected_depth:7.3f} levels")
    print(f"  entry probabilities span {s.min_prob:.3e} .. {s.max_prob:.3e}")

# deepest entries are the high-probability corner paths the greedy
# construction kept expanding
table = build_variable_table(params, 1021)
deepest = max(table, key=lambda e: e.depth)
print(f"\ndeepest entry in S=1021: depth {deepest.depth}, "
      f"prob {deepest.prob:.3e}, row bits {deepest.row_bits:#x}")
