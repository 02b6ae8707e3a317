import numpy as np
import pytest

from msgemm import PerGroup, PerRow, from_codes, group_index, int4_codebook, pack, unpack
from msgemm.packing import codes as stored_codes
from msgemm.packing import dense, group_indices


def test_pack_nibble_layout():
    pwm = pack([[2, 4, 3, 5]], int4_codebook())
    assert list(pwm.data[0]) == [0x42, 0x53]


def test_pack_all_zeros():
    pwm = pack(np.zeros((3, 6)), int4_codebook())
    assert not pwm.data.any()


def test_pack_rejects_unrepresentable():
    with pytest.raises(ValueError):
        pack([[8]], int4_codebook())


def test_unpack_roundtrip():
    pwm = pack([[2, 4, 3, 5]], int4_codebook())
    assert unpack(pwm, 0, 1) == 4
    assert unpack(pack([[-1]], int4_codebook()), 0, 0) == -1


def test_unpack_bounds():
    pwm = pack([[2, 4, 3, 5]], int4_codebook())
    with pytest.raises(IndexError):
        unpack(pwm, 0, 4)
    with pytest.raises(IndexError):
        unpack(pwm, 1, 0)


def test_group_index_examples():
    pwm = pack([[2, 4, 3, 5]], int4_codebook())
    assert group_index(pwm, 0, 0, 2) == 0b0100_0010 == 66
    assert group_index(pwm, 0, 1, 2) == 0b0101_0011 == 83


def test_group_index_zero_row():
    pwm = pack(np.zeros((1, 8)), int4_codebook())
    for d in (1, 2, 4):
        for j in range(8 // d):
            assert group_index(pwm, 0, j, d) == 0


def test_group_index_bounds():
    pwm = pack([[2, 4, 3, 5]], int4_codebook())
    with pytest.raises(IndexError):
        group_index(pwm, 0, 2, 2)


def test_pack_unpack_identity_random():
    cb = int4_codebook()
    rng = np.random.default_rng(3)
    for _ in range(50):
        m = int(rng.integers(1, 9))
        k = int(rng.integers(1, 17))
        w = rng.integers(-8, 8, size=(m, k))
        pwm = pack(w, cb)
        assert np.array_equal(dense(pwm), w)
        i, j = int(rng.integers(m)), int(rng.integers(k))
        assert unpack(pwm, i, j) == w[i, j]


def test_group_index_matches_shift_oracle():
    # independently re-encode each element and shift
    cb = int4_codebook()
    rng = np.random.default_rng(4)
    w = rng.integers(-8, 8, size=(5, 12))
    pwm = pack(w, cb)
    for d in (1, 2, 3, 4):
        idx = group_indices(pwm, d)
        for i in range(5):
            for j in range(12 // d):
                want = sum(cb.encode(w[i, j * d + r]) << (4 * r) for r in range(d))
                assert group_index(pwm, i, j, d) == want
                assert idx[i, j] == want


def test_pack_with_per_row_scales():
    cb = int4_codebook()
    w = np.array([[2.0, 4.0], [3.0, -6.0]])
    pwm = pack(w * np.array([[0.5], [2.0]]), cb, PerRow(q=np.array([0.5, 2.0])))
    assert np.array_equal(dense(pwm), w)


def test_pack_with_per_group_scales():
    cb = int4_codebook()
    q = np.array([[2.0, 3.0]])
    w = np.array([[1.0, -2.0, 4.0, 5.0]])
    scaled = w * np.repeat(q, 2, axis=1)
    pwm = pack(scaled, cb, PerGroup(group_size=2, q=q))
    assert np.array_equal(dense(pwm), w)
    assert np.allclose(dense(pwm, apply_scales=True), scaled)


def test_scale_shape_mismatch():
    cb = int4_codebook()
    with pytest.raises(ValueError):
        pack(np.zeros((2, 4)), cb, PerRow(q=np.zeros(3)))
    with pytest.raises(ValueError):
        pack(np.zeros((2, 4)), cb, PerGroup(group_size=3, q=np.zeros((2, 1))))


def test_from_codes_range_check():
    with pytest.raises(ValueError):
        from_codes([[16]], int4_codebook())


def test_stored_codes_below_width_limit():
    rng = np.random.default_rng(5)
    pwm = from_codes(rng.integers(0, 16, size=(7, 11)), int4_codebook())
    assert stored_codes(pwm).max() < 16
    assert pwm.data.shape == (7, 6)
