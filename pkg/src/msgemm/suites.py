"""Randomized oracle and formula suites shared by the test harness and CLI.

Every generated case compares the two-phase algorithm against the naive
dense reference, or its operation counts against the closed-form phase
costs. Failures carry the seed that reproduces them.

Environment overrides: MSGEMM_CASES (case count) and MSGEMM_SEED.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .codebook import int4_codebook
from .gemm import msgemm, msgemm_counted, naive_gemm
from .packing import PerGroup, PerRow, dense, from_codes

#: per-element relative tolerance for the f32 channel (summation order
#: differs between the two algorithms)
F32_RTOL = 1e-5


@dataclass
class CaseGen:
    """Seeded random case generator for the oracle/formula suites."""

    seed: int = 0
    m_range: tuple[int, int] = (1, 64)
    k_max: int = 48
    b_range: tuple[int, int] = (1, 8)
    depths: tuple[int, ...] = (1, 2, 3, 4)
    scale_modes: tuple[str, ...] = ("none", "per_row", "per_group")
    mode: str = "exact"  # "exact" (int64) or "f32"
    _rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.mode not in ("exact", "f32"):
            raise ValueError(f"mode must be 'exact' or 'f32', got {self.mode!r}")
        self._rng = np.random.default_rng(self.seed)

    def draw(self, d: int | None = None, divisible_only: bool = False,
             scale_mode: str | None = None):
        """One random case: (pwm, X, d, case_seed)."""
        rng = self._rng
        case_seed = int(rng.integers(0, 2 ** 31))
        crng = np.random.default_rng(case_seed)
        if d is None:
            d = int(crng.choice(self.depths))
        m = int(crng.integers(self.m_range[0], self.m_range[1] + 1))
        k = int(crng.integers(d, self.k_max + 1))
        if scale_mode is None:
            scale_mode = str(crng.choice(self.scale_modes))
        if divisible_only or scale_mode == "per_group":
            k = max(d, k - k % d)
        b = int(crng.integers(self.b_range[0], self.b_range[1] + 1))

        cb = int4_codebook()
        codes = crng.integers(0, cb.num_codes, size=(m, k))
        scales = None
        if scale_mode == "per_row":
            scales = PerRow(q=self._scale_values(crng, (m,)))
        elif scale_mode == "per_group":
            multiples = [t for t in (1, 2, 4) if (t * d) <= k and k % (t * d) == 0]
            r = d * int(crng.choice(multiples))
            scales = PerGroup(group_size=r, q=self._scale_values(crng, (m, k // r)))
        pwm = from_codes(codes, cb, scales)

        if self.mode == "exact":
            X = crng.integers(-1000, 1001, size=(k, b)).astype(np.int64)
        else:
            X = crng.standard_normal((k, b)).astype(np.float32)
        return pwm, X, d, case_seed

    def _scale_values(self, crng: np.random.Generator, shape) -> np.ndarray:
        if self.mode == "exact":
            return crng.integers(1, 5, size=shape).astype(np.int64)
        return (0.25 + crng.random(shape)).astype(np.float32)


@dataclass
class SuiteReport:
    cases: int
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    return int(raw) if raw else default


def default_cases(default: int = 200) -> int:
    return _env_int("MSGEMM_CASES", default)


def default_seed(default: int = 0) -> int:
    return _env_int("MSGEMM_SEED", default)


def case_matches(pwm, X, d) -> tuple[bool, float]:
    """Run one oracle comparison; returns (ok, worst relative error).

    Float error is measured against the accumulation magnitude
    sum_j |W(i,j)*x(j)| rather than |y(i)|: under cancellation the output
    can be arbitrarily close to zero while both algorithms are correct to
    working precision.
    """
    W = dense(pwm, apply_scales=True)
    expected = naive_gemm(W, X)
    actual = msgemm(pwm, X, d)
    if np.issubdtype(np.asarray(X).dtype, np.integer):
        ok = bool(np.array_equal(actual, expected))
        return ok, 0.0 if ok else np.inf
    scale = np.abs(W).astype(np.float64) @ np.abs(np.asarray(X, dtype=np.float64))
    denom = np.maximum(scale, 1e-30)
    diff = np.abs(actual.astype(np.float64) - expected.astype(np.float64))
    rel = float(np.max(diff / denom)) if expected.size else 0.0
    return rel <= F32_RTOL, rel


def run_oracle_suite(gen: CaseGen, cases: int) -> SuiteReport:
    """msgemm vs naive_gemm over random cases (tails and scales included)."""
    failures = []
    for _ in range(cases):
        pwm, X, d, case_seed = gen.draw()
        ok, rel = case_matches(pwm, X, d)
        if not ok:
            failures.append(
                f"oracle mismatch (rel={rel:.3g}) at case_seed={case_seed} "
                f"m={pwm.m} k={pwm.k} b={X.shape[1]} d={d} mode={gen.mode}"
            )
    return SuiteReport(cases=cases, failures=failures)


def run_formula_suite(gen: CaseGen, cases: int) -> SuiteReport:
    """Counted ops vs the closed-form phase costs, exact equality."""
    failures = []
    for _ in range(cases):
        pwm, X, d, case_seed = gen.draw(divisible_only=True, scale_mode="none")
        m, k, b = pwm.m, pwm.k, X.shape[1]
        _, counts = msgemm_counted(pwm, X, d)
        want_fma = 2 ** (4 * d) * k * b
        want_add = (k // d - 1) * m * b
        if (counts.fma, counts.add, counts.mem_weights, counts.mem_activations) != \
                (want_fma, want_add, m * k * b, k * b):
            failures.append(
                f"count mismatch at case_seed={case_seed} m={m} k={k} b={b} d={d}: "
                f"got {counts}, want fma={want_fma} add={want_add}"
            )
    return SuiteReport(cases=cases, failures=failures)
