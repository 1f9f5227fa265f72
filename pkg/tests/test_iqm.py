import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from bottleqc.errors import DimensionMismatch, ImageTooSmall, ZeroReference
from bottleqc.imgcore import Roi, crop
from bottleqc.iqm import METRICS, MetricId, compare, mse, nrmse, ssim

C1, C2 = 0.01 ** 2, 0.03 ** 2


def brute_mse(a, b):
    acc = 0.0
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            acc += (a[i, j] - b[i, j]) ** 2
    return acc / a.size


def brute_nrmse(t, r):
    sq = 0.0
    for v in r.ravel():
        sq += v * v
    return (brute_mse(t, r) ** 0.5) / (sq / r.size) ** 0.5


def brute_ssim(a, b, win=7):
    n = win * win
    total, count = 0.0, 0
    for i in range(a.shape[0] - win + 1):
        for j in range(a.shape[1] - win + 1):
            pa = a[i:i + win, j:j + win].ravel()
            pb = b[i:i + win, j:j + win].ravel()
            ma = sum(pa) / n
            mb = sum(pb) / n
            va = sum((x - ma) ** 2 for x in pa) / (n - 1)
            vb = sum((x - mb) ** 2 for x in pb) / (n - 1)
            cov = sum((x - ma) * (y - mb) for x, y in zip(pa, pb)) / (n - 1)
            total += ((2 * ma * mb + C1) * (2 * cov + C2)) / ((ma * ma + mb * mb + C1) * (va + vb + C2))
            count += 1
    return total / count


def random_pairs(count, shape=(16, 16), seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield rng.random(shape), rng.random(shape)


def test_metric_names():
    assert [m.value for m in METRICS] == ["mse", "nrmse", "ssim"]
    assert [m.index for m in METRICS] == [0, 1, 2]


def test_mse_examples():
    img = np.random.default_rng(0).random((8, 8))
    assert mse(img, img) == 0.0
    assert mse(np.zeros((4, 4)), np.ones((4, 4))) == 1.0
    for a, b in random_pairs(5):
        assert mse(a, b) == pytest.approx(brute_mse(a, b), abs=1e-12)


def test_nrmse_examples():
    img = np.random.default_rng(0).random((8, 8))
    assert nrmse(img, img) == 0.0
    assert nrmse(np.full((4, 4), 0.25), np.full((4, 4), 0.5)) == pytest.approx(0.5)
    with pytest.raises(ZeroReference):
        nrmse(img[:4, :4], np.zeros((4, 4)))


def test_ssim_constant_pair():
    # analytic value of the window formula: (2*0.125 + C1) / (0.3125 + C1)
    expected = (2 * 0.125 + C1) / (0.3125 + C1)
    assert ssim(np.full((9, 9), 0.5), np.full((9, 9), 0.25)) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.800064, abs=1e-6)


def test_ssim_identity_and_errors():
    img = np.random.default_rng(0).random((10, 10))
    assert ssim(img, img) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ImageTooSmall):
        ssim(np.zeros((6, 9)), np.zeros((6, 9)))
    with pytest.raises(DimensionMismatch):
        mse(np.zeros((3, 3)), np.zeros((3, 4)))
    with pytest.raises(DimensionMismatch):
        ssim(np.zeros((8, 8)), np.zeros((9, 8)))


def test_ssim_matches_brute_force():
    for a, b in random_pairs(10, seed=3):
        assert ssim(a, b) == pytest.approx(brute_ssim(a, b), abs=1e-6)


def test_compare_dispatch():
    direct = {MetricId.MSE: mse, MetricId.NRMSE: nrmse, MetricId.SSIM: ssim}
    for a, b in random_pairs(10, seed=4):
        for m in METRICS:
            assert compare(a, b, m) == direct[m](a, b)
    img = np.random.default_rng(1).random((8, 8))
    assert compare(img, img, MetricId.MSE) == 0.0
    assert compare(img, img, MetricId.SSIM) == pytest.approx(1.0)


pairs = st.integers(0, 2**32 - 1).map(lambda s: next(random_pairs(1, (9, 11), s)))


@settings(max_examples=50)
@given(pairs)
def test_symmetry_and_range(pair):
    a, b = pair
    assert mse(a, b) == pytest.approx(mse(b, a))
    assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-12)
    assert -1.0 <= ssim(a, b) <= 1.0
    assert mse(a, b) > 0 and ssim(a, b) < 1.0


@settings(max_examples=25)
@given(arrays(np.float64, (12, 12), elements=st.floats(0, 1, allow_nan=False)), st.integers(0, 3), st.integers(0, 3))
def test_crop_then_compare(a, x, y):
    b = np.clip(a + 0.1, 0, 1)
    roi = Roi(x, y, 8, 8)
    ca, cb = crop(a, roi), crop(b, roi)
    assert mse(ca, cb) == mse(a[y:y + 8, x:x + 8], b[y:y + 8, x:x + 8])
    assert ssim(ca, cb) == ssim(a[y:y + 8, x:x + 8].copy(), b[y:y + 8, x:x + 8].copy())
