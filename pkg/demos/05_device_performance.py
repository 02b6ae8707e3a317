"""Device performance estimates: why the arithmetic win needs new hardware.

Phase 1 is FMA work and runs at Tensor-Core-class rates; phase 2 only adds
table entries, which today is CUDA-core work. On an A100 (312 vs 19.5
TFLOPS) that 16x rate gap more than eats the ~2.4x arithmetic saving. A
device that adds table entries at FMA rate recovers the full speedup.
"""

from msgemm import A100, DeviceProfile, GemmDims, estimate, speedup

mlp2 = GemmDims(49152, 12288, 1)

est = estimate(mlp2, 3, A100)
print(f"A100, mlp2, d=3:")
print(f"  phase 1: {est.t_phase1 * 1e6:9.3f} us at {A100.fma_rate:.3g} op/s")
print(f"  phase 2: {est.t_phase2 * 1e6:9.3f} us at {A100.lut_add_rate:.3g} op/s")
print(f"  naive:   {est.t_naive * 1e6:9.3f} us")
print(f"  ratio (serialized) = {est.ratio:.4f} -> slower than naive today")

hypothetical = DeviceProfile(name="lut-add-at-fma-rate",
                             fma_rate=312e12, lut_add_rate=312e12)
est2 = estimate(mlp2, 3, hypothetical)
print(f"\nwith table adds at FMA rate: ratio = {est2.ratio:.4f}")
assert abs(est2.ratio - speedup(49152, 12288, 3)) < 1e-12
print("(equal rates recover the pure arithmetic speedup exactly)")

print("\nratio vs lut-add rate (TFLOPS):")
for tflops in (19.5, 50, 100, 200, 312):
    prof = DeviceProfile(name="x", fma_rate=312e12, lut_add_rate=tflops * 1e12)
    print(f"  {tflops:6.1f} -> {estimate(mlp2, 3, prof).ratio:.4f}")
