import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from bottleqc.errors import ImageTooSmall
from bottleqc.filters import FILTERS, SOBEL_X, SOBEL_Y, FilterId, apply_filter, canny, sobel_gradients

images = arrays(np.float64, st.tuples(st.integers(7, 14), st.integers(7, 14)),
                elements=st.floats(0.0, 1.0, allow_nan=False))


def brute_correlate(img, kernel):
    h, w = img.shape
    out = np.zeros((h, w))
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for di in range(3):
                for dj in range(3):
                    y = min(max(i + di - 1, 0), h - 1)
                    x = min(max(j + dj - 1, 0), w - 1)
                    acc += kernel[di, dj] * img[y, x]
            out[i, j] = acc
    return out


def step_image(n=16):
    img = np.zeros((n, n))
    img[:, n // 2:] = 1.0
    return img


def test_serialized_names_and_order():
    assert [f.value for f in FILTERS] == ["no-filter", "equal-hist", "sobel", "sobel-v", "sobel-h",
                                          "canny-2", "canny-2.5", "canny-3"]
    assert [f.index for f in FILTERS] == list(range(8))


def test_sobel_matches_brute_force_exactly():
    img = np.random.default_rng(0).random((8, 8))
    gx, gy = sobel_gradients(img)
    np.testing.assert_array_equal(gx, brute_correlate(img, SOBEL_X))
    np.testing.assert_array_equal(gy, brute_correlate(img, SOBEL_Y))


def test_sobel_transpose_symmetry():
    img = np.random.default_rng(1).random((9, 11))
    gx, gy = sobel_gradients(img)
    gx_t, gy_t = sobel_gradients(img.T)
    np.testing.assert_allclose(gx_t, gy.T, atol=1e-12)
    np.testing.assert_allclose(gy_t, gx.T, atol=1e-12)


def test_sobel_too_small():
    with pytest.raises(ImageTooSmall):
        sobel_gradients(np.zeros((2, 5)))


@pytest.mark.parametrize("fid", FILTERS)
def test_constant_image(fid):
    img = np.full((10, 12), 0.4)
    out = apply_filter(img, fid)
    if fid is FilterId.NO_FILTER or fid is FilterId.EQUAL_HIST:
        np.testing.assert_array_equal(out, img)
    else:
        np.testing.assert_array_equal(out, 0.0)


def test_vertical_step_sobel():
    img = step_image()
    v = apply_filter(img, FilterId.SOBEL_V)
    np.testing.assert_array_equal(v[:, 7:9], 1.0)
    np.testing.assert_array_equal(v[:, :7], 0.0)
    np.testing.assert_array_equal(v[:, 9:], 0.0)
    np.testing.assert_array_equal(apply_filter(img, FilterId.SOBEL_H), 0.0)


def test_canny_step_is_single_pixel_chain():
    img = step_image(32)
    for fid in (FilterId.CANNY_2, FilterId.CANNY_2_5, FilterId.CANNY_3):
        edges = apply_filter(img, fid)
        assert set(np.unique(edges)) <= {0.0, 1.0}
        per_row = edges.sum(axis=1)
        np.testing.assert_array_equal(per_row, 1.0)
        cols = np.nonzero(edges)[1]
        assert np.all(np.isin(cols, [15, 16]))
        assert len(np.unique(cols)) == 1


def test_canny_edge_count_decreases_with_sigma():
    for seed in range(20):
        rng = np.random.default_rng(seed)
        img = np.clip(step_image(48) * 0.6 + 0.2 + rng.normal(0, 0.08, (48, 48)), 0, 1)
        counts = [apply_filter(img, f).sum() for f in (FilterId.CANNY_2, FilterId.CANNY_2_5, FilterId.CANNY_3)]
        assert counts[2] <= counts[1] <= counts[0], (seed, counts)


@settings(max_examples=40, deadline=None)
@given(images)
def test_outputs_in_range_and_shape(img):
    for fid in FILTERS:
        out = apply_filter(img, fid)
        assert out.shape == img.shape
        assert out.min() >= 0.0 and out.max() <= 1.0
        if fid.value.startswith("canny"):
            assert set(np.unique(out)) <= {0.0, 1.0}


def test_deterministic():
    img = np.random.default_rng(5).random((20, 20))
    for fid in FILTERS:
        np.testing.assert_array_equal(apply_filter(img, fid), apply_filter(img.copy(), fid))


def test_too_small():
    with pytest.raises(ImageTooSmall):
        apply_filter(np.zeros((6, 20)), FilterId.SOBEL)


def test_canny_blank():
    np.testing.assert_array_equal(canny(np.zeros((9, 9)), 2.0), 0.0)
