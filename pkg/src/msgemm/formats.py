"""Binary file formats for weights, activations and outputs.

All integers are little-endian.

Weight file (MSGW):
    magic "MSGW", version:u32=1, m:u64, k:u64, width:u8,
    scale_mode:u8 (0=None, 1=PerRow, 2=PerGroup),
    group_size:u32 (0 unless PerGroup),
    payload: m rows of packed code bytes,
    scales: f32 sequence (m values for PerRow; m * k/group_size values,
    row-major, for PerGroup).

Activation file (MSGA): magic, version:u32=1, k:u64, b:u64, f32
column-major payload. Output file (MSGY) is identical with dims m, b.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .codebook import Codebook, int4_codebook
from .packing import PackedWeightMatrix, PerGroup, PerRow, bytes_per_row

WEIGHT_MAGIC = b"MSGW"
ACTIVATION_MAGIC = b"MSGA"
OUTPUT_MAGIC = b"MSGY"
VERSION = 1

_WEIGHT_HEADER = struct.Struct("<4sIQQBBI")
_MATRIX_HEADER = struct.Struct("<4sIQQ")


class FormatError(ValueError):
    """Malformed or truncated msGeMM data file."""


def write_weights(path, pwm: PackedWeightMatrix) -> None:
    scales = pwm.scales
    if scales is None:
        mode, group_size, q = 0, 0, np.empty(0, dtype=np.float32)
    elif isinstance(scales, PerRow):
        mode, group_size = 1, 0
        q = np.asarray(scales.q, dtype=np.float32)
    elif isinstance(scales, PerGroup):
        mode, group_size = 2, scales.group_size
        q = np.ascontiguousarray(scales.q, dtype=np.float32)
    else:
        raise TypeError(f"unsupported scale spec: {scales!r}")
    header = _WEIGHT_HEADER.pack(WEIGHT_MAGIC, VERSION, pwm.m, pwm.k, pwm.width,
                                 mode, group_size)
    with open(path, "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(pwm.data).tobytes())
        f.write(q.astype("<f4").tobytes())


def read_weights(path, codebook: Codebook | None = None) -> PackedWeightMatrix:
    """Load an MSGW file; the codebook defaults to int4 for width-4 files."""
    blob = Path(path).read_bytes()
    if len(blob) < _WEIGHT_HEADER.size:
        raise FormatError(f"{path}: truncated weight header")
    magic, version, m, k, width, mode, group_size = _WEIGHT_HEADER.unpack_from(blob)
    if magic != WEIGHT_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {WEIGHT_MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if codebook is None:
        if width != 4:
            raise FormatError(f"{path}: width {width} needs an explicit codebook")
        codebook = int4_codebook()
    if codebook.width != width:
        raise FormatError(f"{path}: file width {width} != codebook width {codebook.width}")

    offset = _WEIGHT_HEADER.size
    n_data = m * bytes_per_row(k, width)
    if mode == 0:
        n_scales, scales = 0, None
    elif mode == 1:
        n_scales = m
    elif mode == 2:
        if group_size == 0 or k % group_size != 0:
            raise FormatError(f"{path}: invalid group_size {group_size} for k={k}")
        n_scales = m * (k // group_size)
    else:
        raise FormatError(f"{path}: unknown scale_mode {mode}")
    expected = offset + n_data + 4 * n_scales
    if len(blob) != expected:
        raise FormatError(f"{path}: expected {expected} bytes, found {len(blob)}")

    data = np.frombuffer(blob, dtype=np.uint8, count=n_data, offset=offset)
    data = data.reshape(m, bytes_per_row(k, width)).copy()
    if mode:
        q = np.frombuffer(blob, dtype="<f4", count=n_scales, offset=offset + n_data)
        scales = PerRow(q=q.copy()) if mode == 1 else \
            PerGroup(group_size=group_size, q=q.reshape(m, k // group_size).copy())
    return PackedWeightMatrix(m=m, k=k, width=width, data=data,
                              codebook=codebook, scales=scales)


def _write_matrix(path, magic: bytes, array: np.ndarray) -> None:
    if array.ndim != 2:
        raise ValueError("expected a 2D matrix")
    header = _MATRIX_HEADER.pack(magic, VERSION, array.shape[0], array.shape[1])
    with open(path, "wb") as f:
        f.write(header)
        f.write(np.asfortranarray(array, dtype="<f4").tobytes(order="F"))


def _read_matrix(path, magic: bytes) -> np.ndarray:
    blob = Path(path).read_bytes()
    if len(blob) < _MATRIX_HEADER.size:
        raise FormatError(f"{path}: truncated header")
    got_magic, version, rows, cols = _MATRIX_HEADER.unpack_from(blob)
    if got_magic != magic:
        raise FormatError(f"{path}: bad magic {got_magic!r}, expected {magic!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    expected = _MATRIX_HEADER.size + 4 * rows * cols
    if len(blob) != expected:
        raise FormatError(f"{path}: expected {expected} bytes, found {len(blob)}")
    payload = np.frombuffer(blob, dtype="<f4", offset=_MATRIX_HEADER.size)
    return payload.reshape((rows, cols), order="F").copy(order="F")


def write_activations(path, X) -> None:
    _write_matrix(path, ACTIVATION_MAGIC, np.asarray(X))


def read_activations(path) -> np.ndarray:
    return _read_matrix(path, ACTIVATION_MAGIC)


def write_output(path, Y) -> None:
    _write_matrix(path, OUTPUT_MAGIC, np.asarray(Y))


def read_output(path) -> np.ndarray:
    return _read_matrix(path, OUTPUT_MAGIC)
