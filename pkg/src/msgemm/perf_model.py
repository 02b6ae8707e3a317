"""Parametric wall-clock estimates for the two-phase algorithm.

Phase 1 is built from fused multiply-adds and runs at the FMA-engine rate;
phase 2 only adds table entries and is limited to the device's plain-add
(lut_add) rate. On an A100 the gap is 312 vs 19.5 TFLOPS, which is why the
algorithm's arithmetic savings do not translate to wall-clock wins on
current GPUs.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .cost_model import GemmDims, cost


@dataclass(frozen=True)
class DeviceProfile:
    """Throughput rates (operations/second) for the two phases."""

    name: str
    fma_rate: float
    lut_add_rate: float

    def __post_init__(self) -> None:
        if self.fma_rate <= 0 or self.lut_add_rate <= 0:
            raise ValueError("device rates must be positive")


A100 = DeviceProfile(name="a100", fma_rate=312e12, lut_add_rate=19.5e12)

BUILTIN_PROFILES = {"a100": A100}


@dataclass(frozen=True)
class PerfEstimate:
    """Estimated times in seconds; ratio > 1 means the two-phase algorithm wins."""

    t_phase1: float
    t_phase2: float
    t_msgemm: float
    t_msgemm_pipelined: float
    t_naive: float
    ratio: float
    ratio_pipelined: float
    mem_accesses: int


def estimate(dims: GemmDims, d: int, prof: DeviceProfile) -> PerfEstimate:
    """Time both algorithms under the profile's rates.

    Phases are modeled as serialized (t1 + t2); the perfectly pipelined
    lower bound max(t1, t2) is reported alongside to bracket reality.
    Memory bandwidth is outside the model.
    """
    rep = cost(dims, d)
    t1 = rep.c_lut / prof.fma_rate
    t2 = rep.c_y / prof.lut_add_rate
    t_naive = rep.c_naive / prof.fma_rate
    serialized = t1 + t2
    pipelined = max(t1, t2)
    return PerfEstimate(
        t_phase1=t1,
        t_phase2=t2,
        t_msgemm=serialized,
        t_msgemm_pipelined=pipelined,
        t_naive=t_naive,
        ratio=t_naive / serialized,
        ratio_pipelined=t_naive / pipelined if pipelined else float("inf"),
        mem_accesses=rep.m_total,
    )


def load_profile(path) -> DeviceProfile:
    """Read a profile from a key=value text file.

    Recognized keys: name, fma_rate, lut_add_rate. Blank lines and lines
    starting with '#' are ignored.
    """
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        fields[key.strip()] = value.strip()
    missing = {"fma_rate", "lut_add_rate"} - fields.keys()
    if missing:
        raise ValueError(f"{path}: missing keys: {sorted(missing)}")
    return DeviceProfile(
        name=fields.get("name", Path(path).stem),
        fma_rate=float(fields["fma_rate"]),
        lut_add_rate=float(fields["lut_add_rate"]),
    )


def get_profile(spec: str) -> DeviceProfile:
    """Resolve a builtin profile name or a profile file path."""
    if spec in BUILTIN_PROFILES:
        return BUILTIN_PROFILES[spec]
    if Path(spec).exists():
        return load_profile(spec)
    raise ValueError(f"unknown profile {spec!r}: not a builtin name or a readable file")
