"""Phase 2: consume the table, and check against the naive reference.

Each output element is a sum of k/d table entries, addressed directly by
packed weight codes. The traced variant shows exactly which entries were
summed; per-row and per-group scales apply after summation.
"""

import numpy as np

from msgemm import PerRow, from_codes, int4_codebook, msgemm, msgemm_traced, naive_gemm, pack
from msgemm.packing import dense

cb = int4_codebook()

# the worked 12x4 example: row 0 = {2, 4, 3, 5}
rng = np.random.default_rng(1)
W = np.vstack([[2, 4, 3, 5], rng.integers(-8, 8, size=(11, 4))])
pwm = pack(W, cb)
x = np.array([1, 10, 100, 1000], dtype=np.int64)

y, trace = msgemm_traced(pwm, x, d=2)
print("y(0) =", " + ".join(f"L[{j}][{i:#010b}]={v}" for j, i, v in trace[0]), "=", y[0])
assert np.array_equal(y, naive_gemm(W, x))
print("matches naive GeMM exactly\n")

# batches: one table per activation column
X = rng.integers(-100, 100, size=(4, 3)).astype(np.int64)
assert np.array_equal(msgemm(pwm, X, 2), naive_gemm(W, X))
print("batch of 3 columns: exact match")

# shared scales are applied after consuming the table
q = rng.integers(1, 5, size=12).astype(np.int64)
scaled = from_codes(np.asarray(W) & 0xF, cb, PerRow(q=q))
assert np.array_equal(msgemm(scaled, x, 2), naive_gemm(dense(scaled, apply_scales=True), x))
print("per-row scales: exact match")

# f32 activations: same algorithm, tolerance instead of equality
Xf = rng.standard_normal((4, 2)).astype(np.float32)
diff = np.abs(msgemm(pwm, Xf, 2) - naive_gemm(W, Xf))
print(f"f32 max abs difference vs naive: {diff.max():.2e}")
