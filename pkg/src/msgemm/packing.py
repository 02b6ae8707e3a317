"""Packed weight storage: row-major codes, two 4-bit codes per byte.

Column j of a row lives in byte j // 2; even columns occupy the low
nibble. Depth-d group indices are read as d consecutive codes with the
first code in the least-significant position, so a packed row can be
dereferenced into the lookup table with no per-element arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import Codebook

#: relative tolerance when matching scaled-out weights to codebook values
_MATCH_RTOL = 1e-6


@dataclass(frozen=True)
class PerRow:
    """One shared scale per row of the weight matrix."""

    q: np.ndarray  # shape (m,)


@dataclass(frozen=True)
class PerGroup:
    """One shared scale per group of ``group_size`` consecutive columns."""

    group_size: int
    q: np.ndarray  # shape (m, k // group_size)


ScaleSpec = PerRow | PerGroup | None


def bytes_per_row(k: int, width: int) -> int:
    """Packed bytes per row: nibble/crumb/byte packing for width 4/2/8, else one code per byte."""
    if width == 4:
        return (k + 1) // 2
    if width == 2:
        return (k + 3) // 4
    if width == 8:
        return k
    return k


@dataclass(frozen=True)
class PackedWeightMatrix:
    """An m x k weight matrix stored as packed codes with optional scales."""

    m: int
    k: int
    width: int
    data: np.ndarray  # uint8, shape (m, bytes_per_row(k, width))
    codebook: Codebook
    scales: ScaleSpec = None

    def __post_init__(self) -> None:
        if self.m < 0 or self.k < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if self.width != self.codebook.width:
            raise ValueError("width does not match codebook width")
        expected = (self.m, bytes_per_row(self.k, self.width))
        if self.data.shape != expected:
            raise ValueError(f"packed data shape {self.data.shape} != expected {expected}")
        _validate_scales(self.scales, self.m, self.k)


def _validate_scales(scales: ScaleSpec, m: int, k: int) -> None:
    if scales is None:
        return
    if isinstance(scales, PerRow):
        q = np.asarray(scales.q)
        if q.shape != (m,):
            raise ValueError(f"PerRow scales must have shape ({m},), got {q.shape}")
    elif isinstance(scales, PerGroup):
        r = scales.group_size
        if r <= 0 or k % r != 0:
            raise ValueError(f"group_size {r} must be positive and divide k={k}")
        q = np.asarray(scales.q)
        if q.shape != (m, k // r):
            raise ValueError(f"PerGroup scales must have shape ({m}, {k // r}), got {q.shape}")
    else:
        raise TypeError(f"unsupported scale spec: {scales!r}")


def scale_grid(scales: ScaleSpec, m: int, k: int) -> np.ndarray | None:
    """Per-element scale factors as an (m, k) array, or None when unscaled."""
    if scales is None:
        return None
    if isinstance(scales, PerRow):
        return np.broadcast_to(np.asarray(scales.q)[:, None], (m, k))
    return np.repeat(np.asarray(scales.q), scales.group_size, axis=1)


def _pack_code_rows(codes: np.ndarray, width: int) -> np.ndarray:
    m, k = codes.shape
    codes = codes.astype(np.uint8)
    if width == 4:
        if k % 2:
            codes = np.pad(codes, ((0, 0), (0, 1)))
        return (codes[:, 0::2] | (codes[:, 1::2] << 4)).astype(np.uint8)
    if width == 2:
        pad = (-k) % 4
        if pad:
            codes = np.pad(codes, ((0, 0), (0, pad)))
        out = np.zeros((m, codes.shape[1] // 4), dtype=np.uint8)
        for r in range(4):
            out |= codes[:, r::4] << (2 * r)
        return out
    return codes.copy()


def _unpack_code_rows(data: np.ndarray, k: int, width: int) -> np.ndarray:
    if width == 4:
        codes = np.empty((data.shape[0], data.shape[1] * 2), dtype=np.uint8)
        codes[:, 0::2] = data & 0x0F
        codes[:, 1::2] = data >> 4
        return codes[:, :k]
    if width == 2:
        codes = np.empty((data.shape[0], data.shape[1] * 4), dtype=np.uint8)
        for r in range(4):
            codes[:, r::4] = (data >> (2 * r)) & 0x03
        return codes[:, :k]
    return data[:, :k].copy()


def from_codes(codes, cb: Codebook, scales: ScaleSpec = None) -> PackedWeightMatrix:
    """Pack raw codes (already in 0 .. 2**width - 1) without value encoding."""
    codes = np.asarray(codes)
    if codes.ndim != 2:
        raise ValueError("codes must be a 2D grid")
    if codes.size and (codes.min() < 0 or codes.max() >= cb.num_codes):
        raise ValueError("codes out of range for codebook width")
    m, k = codes.shape
    return PackedWeightMatrix(
        m=m, k=k, width=cb.width,
        data=_pack_code_rows(codes, cb.width),
        codebook=cb, scales=scales,
    )


def pack(weights, cb: Codebook, scales: ScaleSpec = None) -> PackedWeightMatrix:
    """Encode an (m, k) grid of weight values into a PackedWeightMatrix.

    When scales are given, each weight is divided by its group scale first;
    the quotient must land on a codebook value (to relative tolerance 1e-6
    for float codebooks, exactly for integer ones).
    """
    weights = np.asarray(weights)
    if weights.ndim != 2:
        raise ValueError("weights must be a 2D grid")
    m, k = weights.shape
    _validate_scales(scales, m, k)
    grid = scale_grid(scales, m, k)
    scaled = weights if grid is None else weights / grid

    vals = cb.value_array.astype(np.float64)
    flat = np.asarray(scaled, dtype=np.float64).reshape(-1)
    codes = np.abs(flat[:, None] - vals[None, :]).argmin(axis=1)
    matched = vals[codes]
    bad = ~np.isclose(flat, matched, rtol=_MATCH_RTOL, atol=0.0) & ~((flat == 0) & (matched == 0))
    if bad.any():
        culprit = flat[bad][0]
        raise ValueError(f"weight {culprit!r} is not representable in the codebook")
    return from_codes(codes.reshape(m, k), cb, scales)


def codes(pwm: PackedWeightMatrix) -> np.ndarray:
    """All stored codes as an (m, k) uint8 array."""
    return _unpack_code_rows(pwm.data, pwm.k, pwm.width)


def unpack(pwm: PackedWeightMatrix, i: int, j: int):
    """Decoded value at (i, j); the group scale is NOT applied."""
    if not (0 <= i < pwm.m and 0 <= j < pwm.k):
        raise IndexError(f"({i}, {j}) out of bounds for {pwm.m}x{pwm.k}")
    if pwm.width == 4:
        byte = int(pwm.data[i, j // 2])
        code = byte & 0x0F if j % 2 == 0 else byte >> 4
    elif pwm.width == 2:
        code = (int(pwm.data[i, j // 4]) >> (2 * (j % 4))) & 0x03
    else:
        code = int(pwm.data[i, j])
    return pwm.codebook.decode(code)


def dense(pwm: PackedWeightMatrix, apply_scales: bool = False) -> np.ndarray:
    """Decoded (m, k) weight values, optionally with group scales folded in."""
    w = pwm.codebook.value_array[codes(pwm)]
    if apply_scales:
        grid = scale_grid(pwm.scales, pwm.m, pwm.k)
        if grid is not None:
            w = w * grid
    return w


def group_index(pwm: PackedWeightMatrix, i: int, j: int, d: int) -> int:
    """Table index for block j of row i: d consecutive codes, first code in
    the least-significant ``width`` bits. Bit-exact contract."""
    if d < 1:
        raise ValueError("depth d must be >= 1")
    if d * pwm.width > 32:
        raise ValueError(f"d*width = {d * pwm.width} exceeds 32-bit index limit")
    if not 0 <= i < pwm.m:
        raise IndexError(f"row {i} out of bounds")
    if not 0 <= j < pwm.k // d:
        raise IndexError(f"block {j} out of bounds for k={pwm.k}, d={d}")
    idx = 0
    for r in range(d):
        code = int(np.uint8(codes(pwm)[i, j * d + r]))
        idx |= code << (pwm.width * r)
    return idx


def group_indices(pwm: PackedWeightMatrix, d: int) -> np.ndarray:
    """All table indices at once: int64 array of shape (m, k // d)."""
    if d < 1:
        raise ValueError("depth d must be >= 1")
    if d * pwm.width > 32:
        raise ValueError(f"d*width = {d * pwm.width} exceeds 32-bit index limit")
    nb = pwm.k // d
    c = codes(pwm)[:, : nb * d].astype(np.int64).reshape(pwm.m, nb, d)
    shifts = (np.int64(1) << (pwm.width * np.arange(d, dtype=np.int64)))
    return c @ shifts
