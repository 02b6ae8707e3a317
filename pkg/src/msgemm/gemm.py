"""Phase 2: consume the lookup table, plus the naive oracle and op counting.

For each activation column, a fresh table (or block stream) is built and
each output element is the sum of one table entry per d-wide column group.
Scales are applied after summation: per-row scales multiply the finished
row, per-group scales multiply each group's partial sum before the
cross-group sum. A tail of (k mod d) columns is handled by direct
multiply-accumulate.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import lut as lut_mod
from . import packing
from .lut import DEFAULT_BUDGET, TableBudgetError, build_lut, build_lut_block
from .packing import PackedWeightMatrix, PerGroup, PerRow, group_indices


@dataclass(frozen=True)
class OpCount:
    """Arithmetic and memory-access counts for one msGeMM execution.

    fma counts phase-1 table construction; add counts phase-2 table-entry
    additions; mul counts scale applications (not part of the two-phase
    formulas); mem_weights counts weight-code reads and mem_activations
    counts activation reads.
    """

    fma: int = 0
    add: int = 0
    mul: int = 0
    mem_weights: int = 0
    mem_activations: int = 0

    def __add__(self, other: "OpCount") -> "OpCount":
        return OpCount(
            fma=self.fma + other.fma,
            add=self.add + other.add,
            mul=self.mul + other.mul,
            mem_weights=self.mem_weights + other.mem_weights,
            mem_activations=self.mem_activations + other.mem_activations,
        )


def _as_matrix(X) -> tuple[np.ndarray, bool]:
    """Normalize activations to (k, b); remember if the input was a vector."""
    X = np.asarray(X)
    if X.ndim == 1:
        return X[:, None], True
    if X.ndim != 2:
        raise ValueError("activations must be a vector or a (k, b) matrix")
    return X, False


def _check_scales_for_depth(pwm: PackedWeightMatrix, d: int) -> None:
    if isinstance(pwm.scales, PerGroup):
        r = pwm.scales.group_size
        if r < d or r % d != 0:
            raise ValueError(
                f"per-group scaling needs group_size >= d and divisible by d; "
                f"got group_size={r}, d={d}"
            )


def _consume_column(vals: np.ndarray, pwm: PackedWeightMatrix, x: np.ndarray,
                    d: int, nb: int) -> np.ndarray:
    """Reduce the gathered table values (m, nb) for one column, with scales and tail."""
    scales = pwm.scales
    tail = pwm.k - nb * d
    if isinstance(scales, PerGroup):
        per_group = scales.group_size // d
        grouped = vals.reshape(pwm.m, nb // per_group, per_group).sum(axis=2)
        y = (grouped * np.asarray(scales.q).astype(vals.dtype, copy=False)).sum(axis=1)
        return y
    y = vals.sum(axis=1) if nb else np.zeros(pwm.m, dtype=vals.dtype)
    if tail:
        tail_w = pwm.codebook.value_array[packing.codes(pwm)[:, nb * d:]]
        y = y + tail_w.astype(vals.dtype, copy=False) @ x[nb * d:]
    if isinstance(scales, PerRow):
        y = y * np.asarray(scales.q).astype(vals.dtype, copy=False)
    return y


def msgemm(pwm: PackedWeightMatrix, X, d: int, budget: int = DEFAULT_BUDGET,
           workers: int = 1) -> np.ndarray:
    """Two-phase GeMM: dense weights (as packed codes) times activations.

    Returns an (m, b) array, or (m,) when X is a vector. Falls back to
    streaming one table block at a time when the full table exceeds the
    budget; raises TableBudgetError only if a single block does.
    """
    X, was_vector = _as_matrix(X)
    if X.shape[0] != pwm.k:
        raise ValueError(f"activation rows {X.shape[0]} != weight columns {pwm.k}")
    if d < 1:
        raise ValueError("depth d must be >= 1")
    _check_scales_for_depth(pwm, d)

    cb = pwm.codebook
    b = X.shape[1]
    nb = pwm.k // d
    idx = group_indices(pwm, d)
    if lut_mod.block_nbytes(cb, d, X.dtype) > budget:
        raise TableBudgetError("a single table block exceeds the memory budget")
    table_bytes = 2 ** (cb.width * d) * max(nb, 1) * X.dtype.itemsize
    full_fits = table_bytes <= budget

    Y = np.empty((pwm.m, b), dtype=X.dtype)
    block_ids = np.arange(nb)

    def run_streamed(c: int) -> None:
        x = X[:, c]
        vals = np.empty((pwm.m, nb), dtype=X.dtype)
        for j in range(nb):
            vals[:, j] = build_lut_block(x, cb, d, j)[idx[:, j]]
        Y[:, c] = _consume_column(vals, pwm, x, d, nb)

    def run_chunk(lo: int, hi: int) -> None:
        # one table per column, built jointly for the chunk
        if nb == 0:
            for c in range(lo, hi):
                Y[:, c] = _consume_column(np.zeros((pwm.m, 0), dtype=X.dtype),
                                          pwm, X[:, c], d, nb)
            return
        xb = X[: nb * d, lo:hi].T.reshape((hi - lo) * nb, d)
        entries = lut_mod.block_entries(xb, cb).reshape(hi - lo, nb, -1)
        for c in range(lo, hi):
            Y[:, c] = _consume_column(entries[c - lo][block_ids, idx],
                                      pwm, X[:, c], d, nb)

    if not full_fits:
        cols = range(b)
        if workers > 1 and b > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(run_streamed, cols))
        else:
            for c in cols:
                run_streamed(c)
    else:
        chunk = max(1, budget // table_bytes)
        bounds = [(lo, min(lo + chunk, b)) for lo in range(0, b, chunk)]
        if workers > 1 and len(bounds) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(lambda be: run_chunk(*be), bounds))
        else:
            for lo, hi in bounds:
                run_chunk(lo, hi)
    return Y[:, 0] if was_vector else Y


def msgemm_counted(pwm: PackedWeightMatrix, X, d: int, budget: int = DEFAULT_BUDGET,
                   workers: int = 1) -> tuple[np.ndarray, OpCount]:
    """msgemm plus operation counts derived from the executed shapes.

    Requires d | k so counts line up with the closed-form phase costs:
    per column, phase 1 does 2**(width*d) * k FMAs, phase 2 does
    (k/d - 1) * m table-entry additions.
    """
    Xm, _ = _as_matrix(X)
    if pwm.k % d != 0:
        raise ValueError("op counting requires k divisible by d")
    Y = msgemm(pwm, X, d, budget=budget, workers=workers)
    b = Xm.shape[1]
    nb = pwm.k // d
    n_entries = 2 ** (pwm.codebook.width * d)
    mul = 0
    if isinstance(pwm.scales, PerRow):
        mul = pwm.m * b
    elif isinstance(pwm.scales, PerGroup):
        mul = pwm.m * (pwm.k // pwm.scales.group_size) * b
    counts = OpCount(
        fma=n_entries * d * nb * b,
        add=(nb - 1) * pwm.m * b,
        mul=mul,
        mem_weights=pwm.m * pwm.k * b,
        mem_activations=pwm.k * b,
    )
    return Y, counts


def msgemm_traced(pwm: PackedWeightMatrix, x, d: int,
                  budget: int = DEFAULT_BUDGET) -> tuple[np.ndarray, list]:
    """Matrix-vector msgemm with an instrumented lookup trace.

    trace[i] is the list of (block, table_index, table_value) lookups that
    were summed to produce y[i].
    """
    x = np.asarray(x)
    if x.ndim != 1:
        raise ValueError("tracing is defined for a single activation vector")
    y = msgemm(pwm, x, d, budget=budget)
    idx = group_indices(pwm, d)
    table = build_lut(x, pwm.codebook, d, budget=budget)
    trace = [
        [(j, int(idx[i, j]), table.entries[j, idx[i, j]]) for j in range(idx.shape[1])]
        for i in range(pwm.m)
    ]
    return y, trace


def naive_gemm(W, X) -> np.ndarray:
    """Exact dense reference: W @ X with wide integer accumulation."""
    W = np.asarray(W)
    X, was_vector = _as_matrix(X)
    if W.ndim != 2 or W.shape[1] != X.shape[0]:
        raise ValueError(f"shape mismatch: W {W.shape} x X {X.shape}")
    if np.issubdtype(W.dtype, np.integer) and np.issubdtype(X.dtype, np.integer):
        Y = W.astype(np.int64) @ X.astype(np.int64)
    else:
        Y = W @ X
    return Y[:, 0] if was_vector else Y


def naive_gemm_counted(W, X) -> tuple[np.ndarray, OpCount]:
    """naive_gemm plus the rounded-up m*k*b FMA count."""
    W = np.asarray(W)
    Xm, _ = _as_matrix(X)
    Y = naive_gemm(W, X)
    m, k = W.shape
    b = Xm.shape[1]
    counts = OpCount(
        fma=m * k * b,
        mem_weights=m * k,
        mem_activations=k * b,
    )
    return Y, counts
