import numpy as np
import pytest

from msgemm import A100, DeviceProfile, GemmDims, estimate, load_profile, speedup
from msgemm.perf_model import get_profile

MLP2 = GemmDims(49152, 12288, 1)


def test_a100_rates():
    assert A100.fma_rate == 312e12
    assert A100.lut_add_rate == 19.5e12


def test_a100_mlp2_d3_phase2_bound():
    est = estimate(MLP2, 3, A100)
    assert est.ratio < 1
    assert est.t_phase2 > est.t_phase1
    assert est.t_phase2 == pytest.approx((12288 // 3 - 1) * 49152 / 19.5e12, rel=1e-12)


def test_equal_rates_recover_cost_model_speedup():
    prof = DeviceProfile(name="equal", fma_rate=1e12, lut_add_rate=1e12)
    est = estimate(MLP2, 3, prof)
    assert est.ratio == pytest.approx(speedup(49152, 12288, 3), rel=1e-12)
    assert est.ratio == pytest.approx(2.4005, rel=1e-4)


def test_equal_rates_identity_random_shapes():
    rng = np.random.default_rng(8)
    prof = DeviceProfile(name="equal", fma_rate=7.5e11, lut_add_rate=7.5e11)
    for _ in range(25):
        d = int(rng.integers(1, 9))
        m = int(rng.integers(1, 10000))
        k = d * int(rng.integers(1, 2000))
        est = estimate(GemmDims(m, k, 1), d, prof)
        assert est.ratio == pytest.approx(speedup(m, k, d), rel=1e-12)


def test_ratio_monotone_in_lut_add_rate():
    ratios = [
        estimate(MLP2, 3, DeviceProfile(name="p", fma_rate=312e12, lut_add_rate=r)).ratio
        for r in (1e12, 1e13, 1e14, 1e15)
    ]
    assert ratios == sorted(ratios)


def test_infinite_add_rate_limit():
    est = estimate(MLP2, 3, DeviceProfile(name="p", fma_rate=312e12, lut_add_rate=1e30))
    assert est.t_msgemm == pytest.approx(est.t_phase1, rel=1e-10)


def test_pipelined_bound_below_serialized():
    est = estimate(MLP2, 3, A100)
    assert est.t_msgemm_pipelined == max(est.t_phase1, est.t_phase2)
    assert est.t_msgemm_pipelined <= est.t_msgemm


def test_profile_validation():
    with pytest.raises(ValueError):
        DeviceProfile(name="bad", fma_rate=0, lut_add_rate=1)


def test_load_profile_file(tmp_path):
    path = tmp_path / "dev.txt"
    path.write_text("# test device\nname = toy\nfma_rate = 1e12\nlut_add_rate = 5e11\n")
    prof = load_profile(path)
    assert prof.name == "toy"
    assert prof.fma_rate == 1e12
    assert prof.lut_add_rate == 5e11


def test_load_profile_missing_keys(tmp_path):
    path = tmp_path / "dev.txt"
    path.write_text("fma_rate = 1e12\n")
    with pytest.raises(ValueError):
        load_profile(path)


def test_get_profile():
    assert get_profile("a100") is A100
    with pytest.raises(ValueError):
        get_profile("missing.txt")
