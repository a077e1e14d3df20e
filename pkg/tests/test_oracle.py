"""Reference refocus model against literal closed-form filters."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lfrefocus.core import LightfieldError, LightfieldImage, RefocusShift
from lfrefocus.oracle import (
    InterpMode,
    PrecisionMode,
    integral_projection_1d,
    phase_offset,
    refocus_1d,
    refocus_2d,
    round_half_up,
    stored_product_lut,
    taps,
    upsample_row,
)

NN, LIN = InterpMode.NEAREST, InterpMode.LINEAR
EXACT, HW, SUM = PrecisionMode.EXACT, PrecisionMode.HARDWARE, PrecisionMode.SUM_ONLY


def rhu(n, d):
    return (2 * n + d) // (2 * d)


def literal(row, index_fn, M):
    """Evaluate ``out[k] = round(sum_i row[index_fn(k, i)] / M)`` where all taps exist."""
    out = {}
    for k in range(len(row)):
        idx = [index_fn(k, i) for i in range(M)]
        if all(0 <= p < len(row) for p in idx):
            out[k] = rhu(sum(int(row[p]) for p in idx), M)
    return out


def assert_matches(row, shift, ref, phases=None):
    got = refocus_1d(row, shift)
    M = shift.M
    checked = 0
    for k, v in ref.items():
        if phases is not None and k % M not in phases:
            continue
        if got.valid[k]:
            assert got.values[k] == v, k
            checked += 1
    assert checked > 0


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# closed-form filters, written out exactly as their index expressions read

def test_zero_shift_filter(rng):
    for M in (3, 5, 7):
        row = rng.integers(0, 256, 12 * M)
        ref = literal(row, lambda k, i: k - i - (k + 1) % M, M)
        assert_matches(row, RefocusShift(0, M), ref)


def test_unit_sub_pixel_filter(rng):
    for M in (3, 5, 7):
        row = rng.integers(0, 256, 12 * M)
        assert_matches(row, RefocusShift(1, M), literal(row, lambda k, i: k - i, M))


def test_unit_sub_pixel_filter_nine_samples(rng):
    row = rng.integers(0, 256, 9)
    got = refocus_1d(row, RefocusShift(1, 3))
    for k in range(2, 9):
        assert got.valid[k]
        assert got.values[k] == rhu(int(row[k]) + int(row[k - 1]) + int(row[k - 2]), 3)


def test_two_thirds_filter_outside_coincident_phase(rng):
    row = rng.integers(0, 256, 60)

    def idx(k, i):
        flag = abs(-(-((k + 1) % 3) // 3) - 1)
        return k - i + flag * (i - 1)

    # at (k + 1) mod 3 == 0 the closed form repeats one tap three times
    assert_matches(row, RefocusShift(2, 3), literal(row, idx, 3), phases={0, 1})
    k = 5
    assert {idx(k, i) for i in range(3)} == {k - 1}
    # the refocus itself keeps one distinct tap per view
    t = taps(k, RefocusShift(2, 3))
    assert len(t) == 3 and sorted(p % 3 for p in t) == [0, 1, 2]


def test_two_thirds_example_step(rng):
    x = rng.integers(0, 256, 12)
    got = refocus_1d(x, RefocusShift(2, 3))
    assert got.valid[3]
    assert got.values[3] == rhu(int(x[1]) + int(x[2]) + int(x[3]), 3)


def test_integer_shift_filter_offset(rng):
    # forward-looking taps k + i(M - 1) land on the same sums, cM samples later
    for M in (3, 5, 7):
        c = (M - 1) // 2
        row = rng.integers(0, 256, 14 * M)
        ref = literal(row, lambda k, i: k + i * (M - 1), M)
        got = refocus_1d(row, RefocusShift(M, M))
        checked = 0
        for k, v in ref.items():
            if k % M == M - 1 and k + c * M < len(row) and got.valid[k + c * M]:
                assert got.values[k + c * M] == v
                checked += 1
        assert checked > 0


def test_phase_offset_values():
    assert [phase_offset(RefocusShift(a, 3)) for a in range(4)] == [-2, 0, 1, 1]


# resolution, constants and interpolation

@pytest.mark.parametrize("mode", [NN, LIN])
@pytest.mark.parametrize("M", [3, 5, 7])
def test_constant_rows_are_preserved(mode, M):
    for a in range(2 * M + 1):
        got = refocus_1d(np.full(20 * M, 77), RefocusShift(a, M), mode)
        assert got.values.shape == (20 * M,)
        assert got.valid.any()
        assert np.all(got.values[got.valid] == 77)
        hw = refocus_1d(np.full(20 * M, 77), RefocusShift(a, M), mode, HW)
        assert np.all(np.abs(hw.values[hw.valid] - 77) <= M)


def test_upsample_nn_integrates_micro_image():
    row = np.array([10, 20, 30] * 3)
    up = upsample_row(row, 3, NN)
    assert up.shape == (3, 9)
    assert np.array_equal(up[:, 4], [10, 20, 30])
    got = refocus_1d(row, RefocusShift(0, 3))
    assert np.all(got.values[got.valid] == 20)


def test_upsample_linear_constant_and_ramp():
    assert np.all(upsample_row(np.full(15, 9), 3, LIN) == 9)
    # M=5, lenses whose every view equals the lens index: interpolation is a ramp
    M, J = 5, 4
    row = np.repeat(np.arange(J) * 10, M)
    up = upsample_row(row, M, LIN)
    c = (M - 1) // 2
    for q in range(c, (J - 1) * M + c + 1):
        expected = 10 * (q - c) / M
        assert np.allclose(up[:, q], expected)


def test_linear_weights_sum_to_scale():
    for M in (3, 5):
        for a in range(2 * M + 1):
            for k in range(4 * M, 6 * M):
                assert sum(taps(k, RefocusShift(a, M), LIN).values()) == M * M


# precision modes

def test_stored_product_examples():
    assert stored_product_lut(3)[255] == 85
    assert stored_product_lut(3)[1] == 0
    assert stored_product_lut(5)[128] == 26
    assert stored_product_lut(3).shape == (256,)
    assert np.array_equal(stored_product_lut(3, EXACT), np.arange(256))
    with pytest.raises(LightfieldError):
        stored_product_lut(0)


def test_round_half_up():
    assert list(round_half_up(np.array([0, 1, 2, 3, 4, 5]), 2)) == [0, 1, 1, 2, 2, 3]


@pytest.mark.parametrize("M", [3, 5, 7])
def test_hardware_deviation_within_bound_nn(M, rng):
    for a in range(2 * M + 1):
        rows = rng.integers(0, 256, (40, 10 * M))
        ex = refocus_1d(rows, RefocusShift(a, M), NN, EXACT)
        hw = refocus_1d(rows, RefocusShift(a, M), NN, HW)
        dev = np.abs(ex.values - hw.values)[:, ex.valid]
        assert dev.max(initial=0) <= M - 1


def test_sum_only_mode(rng):
    M = 3
    row = rng.integers(0, 255 // M + 1, 30)
    s = refocus_1d(row, RefocusShift(1, M), NN, SUM)
    ex = refocus_1d(row, RefocusShift(1, M), NN, EXACT)
    # sum-only skips the division: the sum of M samples fits the 8-bit range
    assert np.all(s.values[s.valid] <= 255)
    assert np.all(np.abs(s.values - M * ex.values)[s.valid] <= M // 2 + 1)
    with pytest.raises(LightfieldError):
        refocus_1d(np.full(9, 86), RefocusShift(1, 3), NN, SUM)


def test_hardware_rejects_wide_samples():
    with pytest.raises(LightfieldError):
        refocus_1d(np.full(9, 300), RefocusShift(1, 3), NN, HW)


def test_row_length_must_divide():
    with pytest.raises(LightfieldError):
        refocus_1d(np.zeros(10), RefocusShift(1, 3))


# integral projection and its relation to the upsampled path

def test_integral_projection_direct_sum(rng):
    row = rng.integers(0, 256, 15)
    got = integral_projection_1d(row, 1, 3)
    assert got.values.shape == (5,)
    for k in range(5):
        kp = (k + 1) * 3 - 1
        idx = [kp + i * 2 for i in range(3)]
        if all(p < 15 for p in idx):
            assert got.valid[k] and got.values[k] == rhu(sum(int(row[p]) for p in idx), 3)
        else:
            assert not got.valid[k]


def test_integral_projection_constant_and_size():
    got = integral_projection_1d(np.full(12, 40), 1, 3)
    assert got.values.shape == (4,) and np.all(got.values[got.valid] == 40)
    assert integral_projection_1d(np.zeros(3201, dtype=int), 1, 11).values.shape == (291,)
    with pytest.raises(LightfieldError):
        integral_projection_1d(np.zeros(9), 0.5, 3)
    with pytest.raises(LightfieldError):
        integral_projection_1d(np.zeros(9), 0, 3)


@pytest.mark.parametrize("M", [3, 5, 7])
@pytest.mark.parametrize("a", [1, 2])
def test_projection_is_decimated_refocus(M, a, rng):
    c = (M - 1) // 2
    row = rng.integers(0, 256, 20 * M)
    full = refocus_1d(row, RefocusShift(a * M, M))
    proj = integral_projection_1d(row, a, M)
    checked = 0
    for k in range(len(proj.values)):
        kk = (k + a * c + 1) * M - 1
        if proj.valid[k] and kk < len(row) and full.valid[kk]:
            assert proj.values[k] == full.values[kk]
            checked += 1
    assert checked > 0


# two dimensions

def test_refocus_2d_equals_double_closed_form(rng):
    px = rng.integers(0, 256, (9, 9))
    img = LightfieldImage.from_array(px, 3)
    got = refocus_2d(img, RefocusShift(1, 3))
    for l in range(2, 9):
        for k in range(2, 9):
            s = sum(int(px[l - i, k - j]) for i in range(3) for j in range(3))
            assert got.valid[l, k] and got.pixels[0, l, k] == rhu(s, 9)
    assert not got.valid[:2].any() and not got.valid[:, :2].any()


@pytest.mark.parametrize("mode", [NN, LIN])
def test_refocus_2d_constant(mode):
    img = LightfieldImage.from_array(np.full((15, 15, 3), 200), 3)
    for a in range(7):
        got = refocus_2d(img, RefocusShift(a, 3), mode)
        assert got.pixels.shape == (3, 15, 15)
        assert np.all(got.pixels[:, got.valid] == 200)


def test_refocus_2d_hw_is_row_then_column(rng):
    img = LightfieldImage.from_array(rng.integers(0, 256, (15, 15)), 5)
    sh = RefocusShift(3, 5)
    got = refocus_2d(img, sh, NN, HW)
    rows = refocus_1d(img.pixels[0], sh, NN, HW)
    cols = refocus_1d(rows.values.T, sh, NN, HW)
    assert np.array_equal(got.pixels[0], cols.values.T)
    assert np.array_equal(got.valid, rows.valid[None, :] & cols.valid[:, None])


def test_refocus_2d_shift_must_match(rng):
    img = LightfieldImage.from_array(rng.integers(0, 256, (9, 9)), 3)
    with pytest.raises(LightfieldError):
        refocus_2d(img, RefocusShift(1, 5))


# properties

@settings(max_examples=60, deadline=None)
@given(
    M=st.sampled_from([3, 5, 7]),
    a=st.integers(0, 14),
    lenses=st.integers(1, 10),
    seed=st.integers(0, 2**32 - 1),
    mode=st.sampled_from([NN, LIN]),
)
def test_outputs_lie_within_contributing_samples(M, a, lenses, seed, mode):
    row = np.random.default_rng(seed).integers(0, 256, lenses * M)
    shift = RefocusShift(a, M)
    got = refocus_1d(row, shift, mode)
    assert got.values.shape == row.shape
    for k in np.flatnonzero(got.valid):
        vals = [int(row[p]) for p in taps(int(k), shift, mode)]
        assert min(vals) <= got.values[k] <= max(vals)


@settings(max_examples=40, deadline=None)
@given(M=st.sampled_from([3, 5, 7]), seed=st.integers(0, 2**32 - 1))
def test_integer_shift_repeats_in_runs_of_m(M, seed):
    row = np.random.default_rng(seed).integers(0, 256, 12 * M)
    got = refocus_1d(row, RefocusShift(M, M))
    idx = np.flatnonzero(got.valid)
    blocks = {}
    for k in idx:
        blocks.setdefault((k - M + 1) // M, []).append(got.values[k])
    full = [b for b in blocks.values() if len(b) == M]
    assert full
    assert all(len(set(b)) == 1 for b in full)
