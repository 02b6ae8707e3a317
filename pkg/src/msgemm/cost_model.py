"""Closed-form operation counts and speedup of the two-phase algorithm.

All counts are exact Python integers, so sweeps at large depth do not lose
precision. For an m x k x b GeMM at depth d (d | k):

    phase-1 compute  = 2**(4d) * k * b        (table construction FMAs)
    phase-2 compute  = (k/d - 1) * m * b      (table-entry additions)
    naive compute    = m * k * b              (FMAs, rounded up)
    memory accesses  = k * b + m * k          (identical for both algorithms)
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

#: GPT-3 MLP layer shapes used throughout the evaluation
PRESETS = {
    "mlp1": (12288, 49152),
    "mlp2": (49152, 12288),
}


@dataclass(frozen=True)
class GemmDims:
    """Problem size m x k x b."""

    m: int
    k: int
    b: int = 1

    def __post_init__(self) -> None:
        if self.m <= 0 or self.k <= 0 or self.b <= 0:
            raise ValueError(f"dimensions must be positive, got {self}")


@dataclass(frozen=True)
class CostReport:
    """Compute/memory counts for both phases plus the naive baseline."""

    dims: GemmDims
    d: int
    c_lut: int
    m_lut: int
    c_y: int
    m_y: int
    c_total: int
    m_total: int
    c_naive: int
    m_naive: int
    speedup: float


def _check(dims: GemmDims, d: int, width: int) -> None:
    if d < 1:
        raise ValueError("depth d must be >= 1")
    if dims.k % d != 0:
        raise ValueError(f"depth {d} does not divide k={dims.k}")
    if width < 1:
        raise ValueError("width must be >= 1")


def cost(dims: GemmDims, d: int, width: int = 4) -> CostReport:
    """Evaluate the phase costs analytically; any depth is legal (no table
    is materialized)."""
    _check(dims, d, width)
    m, k, b = dims.m, dims.k, dims.b
    c_lut = 2 ** (width * d) * k * b
    c_y = (k // d - 1) * m * b
    m_lut = k * b
    m_y = m * k
    c_naive = m * k * b
    return CostReport(
        dims=dims,
        d=d,
        c_lut=c_lut,
        m_lut=m_lut,
        c_y=c_y,
        m_y=m_y,
        c_total=c_lut + c_y,
        m_total=m_lut + m_y,
        c_naive=c_naive,
        m_naive=m_lut + m_y,
        speedup=float(Fraction(c_naive, c_lut + c_y)),
    )


def speedup(m: int, k: int, d: int, width: int = 4) -> float:
    """m*k / (2**(4d)*k + (k/d - 1)*m); independent of batch size."""
    _check(GemmDims(m, k), d, width)
    return float(Fraction(m * k, 2 ** (width * d) * k + (k // d - 1) * m))


def sweep(cases: Iterable[tuple[str, GemmDims]], d_range: Iterable[int],
          width: int = 4) -> tuple[list[tuple[str, CostReport]], list[tuple[str, int]]]:
    """Cost reports for every (dims, d) pair.

    Depths that do not divide k are skipped, not errors; the skips are
    returned alongside the rows so a sweep over a range stays total.
    """
    cases = list(cases)
    depths = list(d_range)
    if not depths:
        raise ValueError("empty depth range")
    rows: list[tuple[str, CostReport]] = []
    skipped: list[tuple[str, int]] = []
    for name, dims in cases:
        for d in depths:
            if d < 1 or dims.k % d != 0:
                skipped.append((name, d))
                continue
            rows.append((name, cost(dims, d, width=width)))
    return rows, skipped


def preset_dims(name: str, b: int = 1) -> GemmDims:
    """Dims for a named preset shape."""
    try:
        m, k = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None
    return GemmDims(m, k, b)


CSV_HEADER = ["preset", "m", "k", "b", "d", "c_lut", "c_y", "c_total", "c_naive", "speedup"]


def to_csv(rows: Iterable[tuple[str, CostReport]]) -> str:
    """Render sweep rows as CSV, suitable for external plotting."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for name, rep in rows:
        writer.writerow([
            name, rep.dims.m, rep.dims.k, rep.dims.b, rep.d,
            rep.c_lut, rep.c_y, rep.c_total, rep.c_naive,
            f"{rep.speedup:.6g}",
        ])
    return buf.getvalue()
