"""Phase 1: the lookup table of all depth-d linear combinations.

With d=2 and x = [1, 10, 100, 1000], block 0 holds every value of
v0*1 + v1*10 over the 16x16 int4 alphabet -- 256 precomputed combinations
that phase 2 will read instead of multiplying.
"""

import numpy as np

from msgemm import build_lut, build_lut_block, int4_codebook

cb = int4_codebook()
x = np.array([1, 10, 100, 1000], dtype=np.int64)

table = build_lut(x, cb, d=2)
print(f"table: {table.num_blocks} blocks x {table.entries.shape[1]} entries")

# the 2D slice for block 0 (fixing the last index to j=0), int4 rows/cols
idx = lambda i0, i1: (i1 << 4) | i0
print("\nentry (0010, 0100) of block 0:", table.entries[0, idx(0b0010, 0b0100)], "= 2*1 + 4*10")
print("entry (0011, 0101) of block 1:", table.entries[1, idx(0b0011, 0b0101)], "= 3*100 + 5*1000")
print("entry (0000, 0000) is always", table.entries[0, idx(0, 0)])

# a corner of the block-0 table, decoded row/column headers
codes = [0b0000, 0b0001, 0b0010, 0b1111]
print("\nblock 0 corner (rows: v0, cols: v1):")
print("      " + "".join(f"{cb.decode(c1):>7}" for c1 in codes))
for c0 in codes:
    row = [table.entries[0, idx(c0, c1)] for c1 in codes]
    print(f"{cb.decode(c0):>5}:" + "".join(f"{v:>7}" for v in row))

# blocks can be built independently (used to stream when memory is tight)
assert np.array_equal(build_lut_block(x, cb, 2, 1), table.entries[1])
print("\nblock builder matches the full table: OK")
