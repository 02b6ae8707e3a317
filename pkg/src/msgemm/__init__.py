"""Two-phase lookup-table GeMM for low-precision weight matrices.

Phase 1 precomputes every depth-d linear combination of activation values
against the codebook alphabet; phase 2 reads packed weight codes as table
indices and sums one entry per column group. An exact naive reference, an
instrumented operation counter, a closed-form cost/speedup model and a
parametric device performance estimator round out the library.
"""

from .codebook import Codebook, custom_codebook, int4_codebook, uint4_codebook
from .cost_model import CostReport, GemmDims, cost, preset_dims, speedup, sweep
from .formats import (
    FormatError,
    read_activations,
    read_output,
    read_weights,
    write_activations,
    write_output,
    write_weights,
)
from .gemm import (
    OpCount,
    msgemm,
    msgemm_counted,
    msgemm_traced,
    naive_gemm,
    naive_gemm_counted,
)
from .lut import (
    DEFAULT_BUDGET,
    LookupTable,
    TableBudgetError,
    build_lut,
    build_lut_block,
)
from .packing import (
    PackedWeightMatrix,
    PerGroup,
    PerRow,
    dense,
    from_codes,
    group_index,
    group_indices,
    pack,
    unpack,
)
from .perf_model import A100, DeviceProfile, PerfEstimate, estimate, load_profile

__all__ = [
    "A100",
    "Codebook",
    "CostReport",
    "DEFAULT_BUDGET",
    "DeviceProfile",
    "FormatError",
    "GemmDims",
    "LookupTable",
    "OpCount",
    "PackedWeightMatrix",
    "PerfEstimate",
    "PerGroup",
    "PerRow",
    "TableBudgetError",
    "build_lut",
    "build_lut_block",
    "cost",
    "custom_codebook",
    "dense",
    "estimate",
    "from_codes",
    "group_index",
    "group_indices",
    "int4_codebook",
    "load_profile",
    "msgemm",
    "msgemm_counted",
    "msgemm_traced",
    "naive_gemm",
    "naive_gemm_counted",
    "pack",
    "preset_dims",
    "read_activations",
    "read_output",
    "read_weights",
    "speedup",
    "sweep",
    "uint4_codebook",
    "unpack",
    "write_activations",
    "write_output",
    "write_weights",
]

__version__ = "0.1.0"
