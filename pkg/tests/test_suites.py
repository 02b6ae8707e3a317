import numpy as np

from msgemm.suites import CaseGen, run_formula_suite, run_oracle_suite


def test_exact_oracle_suite_small():
    rep = run_oracle_suite(CaseGen(seed=1), 100)
    assert rep.ok, rep.failures[:3]
    assert rep.cases == 100


def test_f32_oracle_suite_small():
    rep = run_oracle_suite(CaseGen(seed=2, mode="f32"), 100)
    assert rep.ok, rep.failures[:3]


def test_tail_cases_covered():
    gen = CaseGen(seed=3, scale_modes=("none",), depths=(3,))
    saw_tail = False
    for _ in range(50):
        pwm, X, d, _ = gen.draw()
        if pwm.k % d:
            saw_tail = True
            break
    assert saw_tail


def test_per_group_sizes_are_valid():
    gen = CaseGen(seed=4, scale_modes=("per_group",))
    for _ in range(50):
        pwm, X, d, _ = gen.draw()
        r = pwm.scales.group_size
        assert r >= d and r % d == 0 and pwm.k % r == 0


def test_formula_suite():
    rep = run_formula_suite(CaseGen(seed=5), 50)
    assert rep.ok, rep.failures[:3]


def test_generator_is_seed_deterministic():
    a = CaseGen(seed=9).draw()
    b = CaseGen(seed=9).draw()
    assert a[3] == b[3]
    assert np.array_equal(a[1], b[1])
    assert np.array_equal(a[0].data, b[0].data)
