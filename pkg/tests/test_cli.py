import numpy as np
import pytest

from msgemm import int4_codebook, pack, read_output, write_activations, write_weights
from msgemm.cli import main

CB = int4_codebook()


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_pack_random_and_unpack_roundtrip(tmp_path, capsys):
    wfile = tmp_path / "w.msgw"
    code, out, _ = run(capsys, "pack", "--random", 12, 4, "--seed", 7, "-o", wfile)
    assert code == 0
    assert "12x4" in out
    code, out, _ = run(capsys, "unpack", wfile)
    assert code == 0
    grid = np.array([[float(v) for v in line.split(",")] for line in out.strip().splitlines()])
    assert grid.shape == (12, 4)


def test_pack_csv_roundtrip(tmp_path, capsys):
    src = tmp_path / "w.csv"
    np.savetxt(src, [[2, 4, 3, 5], [-1, 0, 1, -8]], delimiter=",")
    wfile = tmp_path / "w.msgw"
    assert run(capsys, "pack", "--csv", src, "-o", wfile)[0] == 0
    out_csv = tmp_path / "back.csv"
    assert run(capsys, "unpack", wfile, "--csv", out_csv)[0] == 0
    assert np.array_equal(np.loadtxt(out_csv, delimiter=","),
                          [[2, 4, 3, 5], [-1, 0, 1, -8]])


def test_pack_rejects_out_of_range_csv(tmp_path, capsys):
    src = tmp_path / "bad.csv"
    np.savetxt(src, [[8.0]], delimiter=",")
    code, _, err = run(capsys, "pack", "--csv", src, "-o", tmp_path / "w.msgw")
    assert code == 1
    assert "error" in err


def test_matmul_running_example(tmp_path, capsys):
    wfile, xfile, yfile = tmp_path / "w.msgw", tmp_path / "x.msga", tmp_path / "y.msgy"
    write_weights(wfile, pack([[2, 4, 3, 5]] + [[0, 0, 0, 0]] * 11, CB))
    write_activations(xfile, np.array([[1], [10], [100], [1000]], dtype=np.float32))
    code, out, _ = run(capsys, "matmul", wfile, xfile, "--d", 2,
                       "--mode", "exact-int", "-o", yfile)
    assert code == 0
    assert read_output(yfile)[0, 0] == 5342.0


def test_matmul_count_output(tmp_path, capsys):
    wfile, xfile, yfile = tmp_path / "w.msgw", tmp_path / "x.msga", tmp_path / "y.msgy"
    rng = np.random.default_rng(0)
    write_weights(wfile, pack(rng.integers(-8, 8, size=(12, 4)), CB))
    write_activations(xfile, rng.integers(-9, 9, size=(4, 1)).astype(np.float32))
    code, out, _ = run(capsys, "matmul", wfile, xfile, "--d", 2,
                       "--mode", "exact-int", "--count", "-o", yfile)
    assert code == 0
    assert "fma=1024" in out and "add=12" in out


def test_matmul_d1_matches_verify_reference(tmp_path, capsys):
    wfile, xfile = tmp_path / "w.msgw", tmp_path / "x.msga"
    rng = np.random.default_rng(1)
    write_weights(wfile, pack(rng.integers(-8, 8, size=(6, 5)), CB))
    write_activations(xfile, rng.integers(-9, 9, size=(5, 2)).astype(np.float32))
    code, out, _ = run(capsys, "verify", wfile, xfile, "--d", 1, "--mode", "exact-int")
    assert code == 0
    assert "max abs error = 0" in out


def test_verify_exact_random(tmp_path, capsys):
    wfile, xfile = tmp_path / "w.msgw", tmp_path / "x.msga"
    rng = np.random.default_rng(2)
    write_weights(wfile, pack(rng.integers(-8, 8, size=(12, 4)), CB))
    write_activations(xfile, rng.integers(-99, 99, size=(4, 3)).astype(np.float32))
    code, out, _ = run(capsys, "verify", wfile, xfile, "--d", 2, "--mode", "exact-int")
    assert code == 0
    assert "PASS" in out


def test_verify_f32(tmp_path, capsys):
    wfile, xfile = tmp_path / "w.msgw", tmp_path / "x.msga"
    rng = np.random.default_rng(3)
    write_weights(wfile, pack(rng.integers(-8, 8, size=(32, 24)), CB))
    write_activations(xfile, rng.standard_normal((24, 4)).astype(np.float32))
    code, out, _ = run(capsys, "verify", wfile, xfile, "--d", 3, "--mode", "f32")
    assert code == 0


def test_verify_corrupted_weight_file(tmp_path, capsys):
    bad = tmp_path / "w.msgw"
    bad.write_bytes(b"garbage")
    xfile = tmp_path / "x.msga"
    write_activations(xfile, np.zeros((4, 1), dtype=np.float32))
    code, _, err = run(capsys, "verify", bad, xfile, "--d", 2)
    assert code == 1
    assert "error" in err


def test_cost_presets(tmp_path, capsys):
    csv = tmp_path / "sweep.csv"
    code, out, _ = run(capsys, "cost", "--preset", "mlp1", "--preset", "mlp2",
                       "--d-range", "1..4", "--csv", csv)
    assert code == 0
    lines = csv.read_text().strip().splitlines()
    assert len(lines) == 9
    rows = {(f[0], f[4]): float(f[9]) for f in (line.split(",") for line in lines[1:])}
    assert rows[("mlp2", "3")] == pytest.approx(2.4005, rel=1e-4)
    assert rows[("mlp1", "2")] == pytest.approx(1.9201, rel=1e-4)
    assert rows[("mlp1", "4")] == pytest.approx(0.1791, rel=1e-3)


def test_cost_tiny_m(capsys):
    code, out, _ = run(capsys, "cost", "--m", 1, "--k", 4, "--d-range", "2..2")
    assert code == 0
    row = [line for line in out.splitlines() if line.strip().startswith("custom")][0]
    assert float(row.split()[-1]) < 0.01


def test_cost_invalid_preset(capsys):
    with pytest.raises(SystemExit):
        main(["cost", "--preset", "mlp3", "--d-range", "1..4"])


def test_perf_a100_mlp2(capsys):
    code, out, _ = run(capsys, "perf", "--profile", "a100", "--preset", "mlp2", "--d", 3)
    assert code == 0
    ratio = float(out.split("serialized ratio = ")[1].split(",")[0])
    assert ratio < 1


def test_perf_equal_rate_profile(tmp_path, capsys):
    prof = tmp_path / "equal.txt"
    prof.write_text("name=equal\nfma_rate=1e12\nlut_add_rate=1e12\n")
    code, out, _ = run(capsys, "perf", "--profile", prof, "--preset", "mlp2", "--d", 3)
    assert code == 0
    ratio = float(out.split("serialized ratio = ")[1].split(",")[0])
    assert ratio == pytest.approx(2.4005, rel=1e-4)


def test_perf_missing_profile(capsys):
    code, _, err = run(capsys, "perf", "--profile", "missing.txt",
                       "--preset", "mlp2", "--d", 3)
    assert code == 1


def test_bench_runs_both_modes(capsys):
    for mode in ("exact-int", "f32"):
        code, out, _ = run(capsys, "bench", "--m", 64, "--k", 16, "--d", 2,
                           "--iters", 2, "--mode", mode)
        assert code == 0
        assert "naive" in out and "msgemm" in out and "counted-op ratio" in out


def test_bench_zero_iters(capsys):
    code, _, err = run(capsys, "bench", "--m", 4, "--k", 4, "--d", 2, "--iters", 0)
    assert code == 1


def test_seed_determinism(tmp_path, capsys):
    w1, w2 = tmp_path / "a.msgw", tmp_path / "b.msgw"
    run(capsys, "pack", "--random", 8, 6, "--seed", 11, "-o", w1)
    run(capsys, "pack", "--random", 8, 6, "--seed", 11, "-o", w2)
    assert w1.read_bytes() == w2.read_bytes()
