"""Command-line surface: pack, unpack, matmul, verify, cost, perf, bench.

Exit codes: 0 success, 1 validation/format error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import formats
from .codebook import int4_codebook
from .cost_model import GemmDims, cost, preset_dims, sweep, to_csv
from .gemm import msgemm, msgemm_counted, naive_gemm, naive_gemm_counted
from .lut import DEFAULT_BUDGET, TableBudgetError
from .packing import PerGroup, PerRow, dense, from_codes, pack
from .perf_model import estimate, get_profile
from .suites import F32_RTOL

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VERIFY_FAILED = 2


def _parse_d_range(text: str) -> range:
    lo, sep, hi = text.partition("..")
    if not sep:
        lo = hi = text
    try:
        lo_i, hi_i = int(lo), int(hi)
    except ValueError:
        raise ValueError(f"bad depth range {text!r}, expected A..B") from None
    if lo_i < 1 or hi_i < lo_i:
        raise ValueError(f"bad depth range {text!r}")
    return range(lo_i, hi_i + 1)


def _dims_from_args(args) -> list[tuple[str, GemmDims]]:
    cases = []
    for name in args.preset or []:
        cases.append((name, preset_dims(name, b=args.b)))
    if args.m is not None or args.k is not None:
        if args.m is None or args.k is None:
            raise ValueError("--m and --k must be given together")
        cases.append(("custom", GemmDims(args.m, args.k, args.b)))
    if not cases:
        raise ValueError("give --preset and/or --m/--k")
    return cases


def _random_weights(m: int, k: int, seed: int, scale_mode: str, group_size: int):
    rng = np.random.default_rng(seed)
    cb = int4_codebook()
    codes = rng.integers(0, cb.num_codes, size=(m, k))
    scales = None
    if scale_mode == "per-row":
        scales = PerRow(q=(0.25 + rng.random(m)).astype(np.float32))
    elif scale_mode == "per-group":
        if group_size <= 0 or k % group_size != 0:
            raise ValueError(f"--group-size must divide k={k}")
        scales = PerGroup(group_size=group_size,
                          q=(0.25 + rng.random((m, k // group_size))).astype(np.float32))
    return from_codes(codes, cb, scales)


def _load_activations(args) -> np.ndarray:
    X = formats.read_activations(args.activations)
    if args.mode == "exact-int":
        as_int = X.astype(np.int64)
        if not np.array_equal(as_int.astype(X.dtype), X):
            raise ValueError("exact-int mode needs integer-valued activations")
        return as_int
    return X


def cmd_pack(args) -> int:
    if args.csv:
        weights = np.loadtxt(args.csv, delimiter=",", ndmin=2)
        pwm = pack(weights, int4_codebook())
    else:
        m, k = args.random
        pwm = _random_weights(m, k, args.seed, args.scale_mode, args.group_size)
    formats.write_weights(args.output, pwm)
    mode = "none" if pwm.scales is None else \
        "per-row" if isinstance(pwm.scales, PerRow) else \
        f"per-group(r={pwm.scales.group_size})"
    print(f"packed {pwm.m}x{pwm.k} int4 weights, scales={mode} -> {args.output}")
    return EXIT_OK


def cmd_unpack(args) -> int:
    pwm = formats.read_weights(args.weights)
    w = dense(pwm)
    if args.csv:
        np.savetxt(args.csv, w, delimiter=",", fmt="%.9g")
        print(f"unpacked {pwm.m}x{pwm.k} -> {args.csv}")
    else:
        np.savetxt(sys.stdout, w, delimiter=",", fmt="%.9g")
    return EXIT_OK


def cmd_matmul(args) -> int:
    pwm = formats.read_weights(args.weights)
    X = _load_activations(args)
    if args.count:
        Y, counts = msgemm_counted(pwm, X, args.d, budget=args.budget,
                                   workers=args.workers)
        rep = cost(GemmDims(pwm.m, pwm.k, X.shape[1]), args.d)
        print(f"counted:   fma={counts.fma} add={counts.add} mul={counts.mul} "
              f"mem_weights={counts.mem_weights} mem_activations={counts.mem_activations}")
        print(f"predicted: fma={rep.c_lut} add={rep.c_y} "
              f"(phase-1/phase-2 closed forms)")
    else:
        Y = msgemm(pwm, X, args.d, budget=args.budget, workers=args.workers)
    formats.write_output(args.output, Y.astype(np.float32))
    print(f"wrote {Y.shape[0]}x{Y.shape[1]} output -> {args.output}")
    return EXIT_OK


def cmd_verify(args) -> int:
    pwm = formats.read_weights(args.weights)
    X = _load_activations(args)
    actual = msgemm(pwm, X, args.d, budget=args.budget, workers=args.workers)
    expected = naive_gemm(dense(pwm, apply_scales=True), X)
    abs_err = np.abs(actual.astype(np.float64) - expected.astype(np.float64))
    max_abs = float(abs_err.max()) if abs_err.size else 0.0
    denom = np.maximum(np.abs(expected.astype(np.float64)), 1e-30)
    max_rel = float((abs_err / denom).max()) if abs_err.size else 0.0
    print(f"max abs error = {max_abs:.6g}, max rel error = {max_rel:.6g}")
    ok = max_abs == 0.0 if args.mode == "exact-int" else max_rel <= F32_RTOL
    print("verify: PASS" if ok else "verify: FAIL")
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_cost(args) -> int:
    cases = _dims_from_args(args)
    depths = _parse_d_range(args.d_range)
    rows, skipped = sweep(cases, depths)
    header = f"{'preset':>8} {'m':>8} {'k':>8} {'b':>4} {'d':>2} " \
             f"{'c_total':>16} {'c_naive':>16} {'speedup':>9}"
    print(header)
    for name, rep in rows:
        print(f"{name:>8} {rep.dims.m:>8} {rep.dims.k:>8} {rep.dims.b:>4} {rep.d:>2} "
              f"{rep.c_total:>16} {rep.c_naive:>16} {rep.speedup:>9.4f}")
    for name, d in skipped:
        print(f"{name:>8}: skipped d={d} (does not divide k)")
    if args.csv:
        with open(args.csv, "w") as f:
            f.write(to_csv(rows))
        print(f"wrote {len(rows)} rows -> {args.csv}")
    return EXIT_OK


def cmd_perf(args) -> int:
    prof = get_profile(args.profile)
    cases = _dims_from_args(args)
    for name, dims in cases:
        est = estimate(dims, args.d, prof)
        print(f"{name} ({dims.m}x{dims.k}x{dims.b}, d={args.d}) on {prof.name}:")
        print(f"  t_phase1 = {est.t_phase1:.6e} s  (fma rate {prof.fma_rate:.4g}/s)")
        print(f"  t_phase2 = {est.t_phase2:.6e} s  (lut-add rate {prof.lut_add_rate:.4g}/s)")
        print(f"  t_naive  = {est.t_naive:.6e} s")
        print(f"  serialized ratio = {est.ratio:.4f}, pipelined ratio = {est.ratio_pipelined:.4f}")
        print(f"  memory accesses (both algorithms) = {est.mem_accesses}")
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.iters < 1:
        raise ValueError("--iters must be >= 1")
    if args.k % args.d != 0:
        raise ValueError(f"--d {args.d} must divide --k {args.k}")
    pwm = _random_weights(args.m, args.k, args.seed, "none", 0)
    rng = np.random.default_rng(args.seed + 1)
    if args.mode == "exact-int":
        X = rng.integers(-1000, 1001, size=(args.k, args.b)).astype(np.int64)
    else:
        X = rng.standard_normal((args.k, args.b)).astype(np.float32)
    W = dense(pwm)
    if args.mode != "exact-int":
        W = W.astype(np.float32)

    def median_time(fn) -> float:
        samples = []
        for _ in range(args.iters):
            t0 = time.perf_counter()
            fn()
            samples.append(time.perf_counter() - t0)
        return float(np.median(samples))

    t_naive = median_time(lambda: naive_gemm(W, X))
    t_ms = median_time(lambda: msgemm(pwm, X, args.d, budget=args.budget,
                                      workers=args.workers))
    _, ms_counts = msgemm_counted(pwm, X, args.d, budget=args.budget)
    _, nv_counts = naive_gemm_counted(W, X)
    op_ratio = nv_counts.fma / (ms_counts.fma + ms_counts.add)
    print(f"bench {args.m}x{args.k}x{args.b}, d={args.d}, mode={args.mode}, "
          f"iters={args.iters}")
    print(f"  naive   median = {t_naive:.6f} s")
    print(f"  msgemm  median = {t_ms:.6f} s")
    print(f"  wall-clock ratio = {t_naive / t_ms:.3f}x (informational)")
    print(f"  counted-op ratio = {op_ratio:.4f}x")
    return EXIT_OK


def _add_dims_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", action="append", choices=["mlp1", "mlp2"],
                   help="named GeMM shape (repeatable)")
    p.add_argument("--m", type=int, help="rows of the weight matrix")
    p.add_argument("--k", type=int, help="inner dimension")
    p.add_argument("--b", type=int, default=1, help="batch size")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msgemm",
        description="Two-phase lookup-table GeMM for int4 weights: "
                    "pack weights, run and verify matmuls, and evaluate the "
                    "analytical cost and device performance models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pack", help="pack weights into an MSGW file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--csv", help="CSV file of weight values")
    src.add_argument("--random", nargs=2, type=int, metavar=("M", "K"),
                     help="generate random int4 weights")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale-mode", choices=["none", "per-row", "per-group"],
                   default="none")
    p.add_argument("--group-size", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("unpack", help="decode an MSGW file to CSV")
    p.add_argument("weights")
    p.add_argument("--csv", help="output CSV path (default: stdout)")
    p.set_defaults(func=cmd_unpack)

    for name, fn, extra in (("matmul", cmd_matmul, True), ("verify", cmd_verify, False)):
        p = sub.add_parser(name, help=f"{name} a weight file against activations")
        p.add_argument("weights", help="MSGW weight file")
        p.add_argument("activations", help="MSGA activation file")
        p.add_argument("--d", type=int, required=True, help="lookup-table depth")
        p.add_argument("--mode", choices=["exact-int", "f32"], default="f32")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
        p.add_argument("--workers", type=int, default=1)
        if extra:
            p.add_argument("--count", action="store_true",
                           help="print operation counts next to the closed-form predictions")
            p.add_argument("-o", "--output", required=True, help="MSGY output file")
        p.set_defaults(func=fn)

    p = sub.add_parser("cost", help="closed-form cost sweep (regenerates the speedup curve)")
    _add_dims_flags(p)
    p.add_argument("--d-range", default="1..4", help="depth range A..B")
    p.add_argument("--csv", help="also write rows to this CSV file")
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("perf", help="device wall-clock estimate")
    p.add_argument("--profile", default="a100",
                   help="builtin profile name or key=value profile file")
    _add_dims_flags(p)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_perf)

    p = sub.add_parser("bench", help="CPU wall-clock benchmark (informational)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--iters", type=int, default=5)
    p.add_argument("--mode", choices=["exact-int", "f32"], default="f32")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, IndexError, OSError, TableBudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
