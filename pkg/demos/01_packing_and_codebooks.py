"""Codebooks and nibble-packed weight storage.

Weights live as 4-bit codes, two per byte, with the even column in the low
nibble. A codebook maps codes to values; the built-in int4 codebook follows
two's complement.
"""

import numpy as np

from msgemm import group_index, int4_codebook, pack, uint4_codebook, unpack
from msgemm.packing import dense

cb = int4_codebook()
print("int4 decode table:", [cb.decode(c) for c in range(16)])
print("encode(-1) ->", bin(cb.encode(-1)))

# the running example's first row
pwm = pack([[2, 4, 3, 5]], cb)
print("\npacked bytes:", [hex(b) for b in pwm.data[0]])
print("unpack(0, 1) ->", unpack(pwm, 0, 1))

# two consecutive codes concatenate into a table index with no arithmetic:
# codes {2, 4} -> 0b0100_0010 = 66
print("\ngroup_index(row 0, block 0, d=2) ->", group_index(pwm, 0, 0, 2))
print("group_index(row 0, block 1, d=2) ->", group_index(pwm, 0, 1, 2))

# round-trip a random matrix
rng = np.random.default_rng(0)
w = rng.integers(-8, 8, size=(4, 6))
assert np.array_equal(dense(pack(w, cb)), w)
print("\nrandom 4x6 round-trip: OK")

print("uint4 decode(15) ->", uint4_codebook().decode(15))
