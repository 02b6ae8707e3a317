"""Closed-form cost model: when does the table pay for itself?

Sweeps the table depth for the two GPT-3 MLP GeMM shapes. Phase-1 cost
grows as 2**(4d) but is independent of m, so tall matrices amortize it;
the sweet spot for these shapes is d=3 on the 48K-row layer.
"""

from msgemm import GemmDims, cost, preset_dims
from msgemm.cost_model import sweep, to_csv

cases = [(name, preset_dims(name)) for name in ("mlp1", "mlp2")]
rows, skipped = sweep(cases, range(1, 5))

print(f"{'shape':>6} {'d':>2} {'phase1 (FMA)':>15} {'phase2 (add)':>15} {'speedup':>8}")
for name, rep in rows:
    print(f"{name:>6} {rep.d:>2} {rep.c_lut:>15} {rep.c_y:>15} {rep.speedup:>8.4f}")

# batch size never changes the ratio: both costs scale linearly with b
for b in (1, 7):
    assert cost(GemmDims(49152, 12288, b), 3).speedup == cost(preset_dims("mlp2"), 3).speedup
print("\nspeedup is batch-size invariant: OK")

# CSV for plotting the speedup-vs-depth curve externally
print("\n" + to_csv(rows))
