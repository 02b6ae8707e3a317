"""Phase 1: build the lookup table of all depth-d linear combinations.

For one activation vector x, block j of the table holds, at index
``i0 + i1*2**width + ...``, the value

    decode(i0)*x[j*d + 0] + decode(i1)*x[j*d + 1] + ... + decode(i_{d-1})*x[j*d + d - 1]

Blocks are independent, so construction can be split across workers or
streamed one block at a time when the full table exceeds the memory budget.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .codebook import Codebook

#: default cap on materialized table size, in bytes
DEFAULT_BUDGET = 1 << 30

#: materialized tables are capped at this depth; larger depths are
#: evaluated analytically by the cost model only
MAX_MATERIALIZED_DEPTH = 4


class TableBudgetError(MemoryError):
    """The requested lookup table does not fit in the memory budget."""


@dataclass(frozen=True)
class LookupTable:
    """Block-major table: entries[j, idx] is the combination for block j."""

    d: int
    width: int
    num_blocks: int
    entries: np.ndarray  # shape (num_blocks, 2**(width*d))


@lru_cache(maxsize=32)
def _decode_matrix(values: tuple, width: int, d: int) -> np.ndarray:
    """(2**(width*d), d) array: column r holds decode of nibble r of each index."""
    n = 2 ** (width * d)
    idx = np.arange(n, dtype=np.int64)
    vals = np.asarray(values)
    cols = [vals[(idx >> (width * r)) & (2 ** width - 1)] for r in range(d)]
    return np.stack(cols, axis=1)


def decode_matrix(cb: Codebook, d: int) -> np.ndarray:
    """Cached decode matrix for a codebook at depth d."""
    return _decode_matrix(cb.values, cb.width, d)


def block_entries(xb: np.ndarray, cb: Codebook) -> np.ndarray:
    """Entries for blocks given as an (nb, d) activation slice; returns (nb, 2**(width*d)).

    Built by composing per-position product tables with outer additions:
    depth r extends the table of all (i_0 .. i_{r-1}) combinations by one
    more position, keeping i_0 in the least-significant code position.
    """
    nb, d = xb.shape
    vals = cb.value_array.astype(xb.dtype, copy=False)
    acc = np.multiply.outer(xb[:, 0], vals)  # (nb, 2**width)
    for r in range(1, d):
        tab = np.multiply.outer(xb[:, r], vals)
        acc = (tab[:, :, None] + acc[:, None, :]).reshape(nb, -1)
    return acc


def _check_depth(cb: Codebook, d: int) -> None:
    if d < 1:
        raise ValueError("depth d must be >= 1")
    if d > MAX_MATERIALIZED_DEPTH:
        raise ValueError(
            f"materialized tables are capped at depth {MAX_MATERIALIZED_DEPTH}, got {d}"
        )


def block_nbytes(cb: Codebook, d: int, dtype) -> int:
    return 2 ** (cb.width * d) * np.dtype(dtype).itemsize


def build_lut_block(x, cb: Codebook, d: int, j: int) -> np.ndarray:
    """Block j of the table: 2**(width*d) scalars in group-index order."""
    x = np.asarray(x)
    _check_depth(cb, d)
    nb = x.shape[0] // d
    if not 0 <= j < nb:
        raise IndexError(f"block {j} out of range; k={x.shape[0]}, d={d} gives {nb} blocks")
    return block_entries(x[j * d:(j + 1) * d][None, :], cb)[0]


def build_lut(x, cb: Codebook, d: int, budget: int = DEFAULT_BUDGET,
              workers: int = 1) -> LookupTable:
    """Materialize the full table for activation vector x.

    Raises TableBudgetError when 2**(width*d) * (k // d) entries would
    exceed ``budget`` bytes; callers then stream blocks instead.
    """
    x = np.asarray(x)
    if x.ndim != 1:
        raise ValueError("x must be a 1D activation vector")
    _check_depth(cb, d)
    nb = x.shape[0] // d
    n_entries = 2 ** (cb.width * d)
    nbytes = n_entries * nb * x.dtype.itemsize
    if nbytes > budget:
        raise TableBudgetError(
            f"table of {nbytes} bytes exceeds budget of {budget} bytes"
        )
    xb = x[: nb * d].reshape(nb, d)
    entries = np.empty((nb, n_entries), dtype=x.dtype)
    if workers > 1 and nb > 1:
        def fill(lo: int, hi: int) -> None:
            entries[lo:hi] = block_entries(xb[lo:hi], cb)
        step = -(-nb // workers)
        bounds = [(lo, min(lo + step, nb)) for lo in range(0, nb, step)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda be: fill(*be), bounds))
    elif nb:
        entries[:] = block_entries(xb, cb)
    return LookupTable(d=d, width=cb.width, num_blocks=nb, entries=entries)
