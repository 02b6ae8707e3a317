"""Codebooks: the bijection between low-precision bit codes and scalar values.

A codebook decodes a ``width``-bit code to a scalar and encodes a scalar
back to its code. The lookup-table machinery is value-agnostic: any table
of 2**width distinct finite scalars works (signed ints, unsigned ints, an
fp8-like alphabet, ...).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Codebook:
    """Bijection between codes ``0 .. 2**width - 1`` and scalar values.

    Attributes:
        width: bits per code, 2..8.
        values: tuple of 2**width distinct finite scalars, indexed by code.
        zero_code: the code that decodes to exactly 0, or None.
    """

    width: int
    values: tuple
    zero_code: int | None = field(default=None)

    def __post_init__(self) -> None:
        if not 2 <= self.width <= 8:
            raise ValueError(f"width must be in 2..8, got {self.width}")
        n = 2 ** self.width
        if len(self.values) != n:
            raise ValueError(f"expected {n} values for width {self.width}, got {len(self.values)}")
        if any(not np.isfinite(v) for v in self.values):
            raise ValueError("codebook values must be finite")
        if len(set(self.values)) != n:
            raise ValueError("codebook values must be distinct (encode must invert decode)")
        zero = None
        for c, v in enumerate(self.values):
            if v == 0:
                zero = c
                break
        object.__setattr__(self, "zero_code", zero)
        object.__setattr__(self, "_encode_map", {v: c for c, v in enumerate(self.values)})
        object.__setattr__(self, "_value_array", np.asarray(self.values))

    @property
    def num_codes(self) -> int:
        return 2 ** self.width

    @property
    def value_array(self) -> np.ndarray:
        """Values as an ndarray indexable by code."""
        return self._value_array

    def decode(self, code: int):
        """Scalar value of a code."""
        if not 0 <= code < self.num_codes:
            raise ValueError(f"code {code} out of range for width {self.width}")
        return self.values[code]

    def encode(self, value) -> int:
        """Code of a scalar value; the value must be in the codebook."""
        code = self._encode_map.get(value)
        if code is None:
            raise ValueError(f"value {value!r} is not representable in this codebook")
        return code

    def is_integer(self) -> bool:
        """True when every value is an integer (exact int64 arithmetic applies)."""
        return all(float(v).is_integer() for v in self.values)


def int4_codebook() -> Codebook:
    """Two's-complement int4: codes 0..7 -> 0..7, codes 8..15 -> -8..-1."""
    values = tuple(c if c < 8 else c - 16 for c in range(16))
    return Codebook(width=4, values=values)


def uint4_codebook() -> Codebook:
    """Unsigned int4: code c decodes to c."""
    return Codebook(width=4, values=tuple(range(16)))


def custom_codebook(values) -> Codebook:
    """Codebook over an arbitrary value table; len(values) must be a power of two."""
    n = len(values)
    width = n.bit_length() - 1
    if n != 2 ** width:
        raise ValueError(f"value table length must be a power of two, got {n}")
    return Codebook(width=width, values=tuple(values))
