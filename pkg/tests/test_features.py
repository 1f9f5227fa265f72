import math

import numpy as np
import pytest

from bottleqc.errors import TooFewSamples
from bottleqc.features import (FEATURE_NAMES, N_FEATURES, LabeledSample, Reference, Standardizer,
                               extract_features, feature_index, fit_standardizer, format_timestamp,
                               parse_timestamp, read_feature_table, standardize, write_feature_table)
from bottleqc.filters import FILTERS, FilterId, apply_filter
from bottleqc.imgcore import crop
from bottleqc.iqm import METRICS, MetricId, compare
from bottleqc.synth import CorpusConfig, DefectSpec, Pose, default_window, render_clean, render_instance


@pytest.fixture(scope="module")
def setup():
    cfg = CorpusConfig()
    ref = render_clean(cfg, 100, Pose())
    return cfg, ref, default_window(cfg)


def test_ordering_contract():
    assert N_FEATURES == 24
    assert FEATURE_NAMES[0] == "no-filter-mse"
    assert FEATURE_NAMES[23] == "canny-3-ssim"
    assert feature_index(FilterId.CANNY_3, MetricId.SSIM) == 23
    for f in FILTERS:
        for m in METRICS:
            assert FEATURE_NAMES[feature_index(f, m)] == f"{f.value}-{m.value}"


def test_identity_comparison(setup):
    _, ref, window = setup
    fv, result = extract_features(ref, ref, window)
    assert result.succeeded
    for f in FILTERS:
        assert fv[feature_index(f, MetricId.MSE)] == pytest.approx(0.0, abs=1e-9)
        assert fv[feature_index(f, MetricId.NRMSE)] == pytest.approx(0.0, abs=1e-6)
        assert fv[feature_index(f, MetricId.SSIM)] == pytest.approx(1.0, abs=1e-6)


def test_unaligned_equals_aligned_when_registered(setup):
    _, ref, window = setup
    same_pose = ref.copy()
    aligned, result = extract_features(same_pose, ref, window, use_alignment=True)
    unaligned, none = extract_features(same_pose, ref, window, use_alignment=False)
    assert none is None and result.succeeded
    np.testing.assert_allclose(aligned, unaligned, atol=1e-9)


def test_smear_increases_no_filter_mse(setup):
    cfg, ref, window = setup
    clean, _ = extract_features(render_clean(cfg, 102), ref, window)
    smeared_img = render_instance(cfg, 102, defects=(DefectSpec("smear", 12.0),)).image
    smeared, _ = extract_features(smeared_img, ref, window)
    assert smeared[0] > clean[0]


def test_local_filters_match_full_frame(setup):
    cfg, ref, window = setup
    test = render_clean(cfg, 103, Pose())
    reference = Reference(ref, window)
    fv, _ = extract_features(test, reference, use_alignment=False)
    for f in (FilterId.NO_FILTER, FilterId.SOBEL, FilterId.SOBEL_V, FilterId.SOBEL_H):
        for m in METRICS:
            full = compare(crop(apply_filter(test, f), window), crop(apply_filter(ref, f), window), m)
            assert fv[feature_index(f, m)] == full


def test_deterministic(setup):
    cfg, ref, window = setup
    test = render_clean(cfg, 104)
    a, ra = extract_features(test, ref, window, seed=5)
    b, rb = extract_features(test, ref, window, seed=5)
    np.testing.assert_array_equal(a, b)
    assert ra.to_record() == rb.to_record()


def test_standardizer_examples():
    s = fit_standardizer([np.zeros(24), np.full(24, 2.0)])
    np.testing.assert_allclose(s.mean, 1.0)
    np.testing.assert_allclose(s.std, math.sqrt(2.0))
    np.testing.assert_allclose(standardize(s, s.mean), 0.0)
    np.testing.assert_allclose(standardize(s, np.zeros(24)), -1 / math.sqrt(2.0))
    flat = fit_standardizer([np.arange(24.0)] * 3)
    assert flat.flagged.all()
    np.testing.assert_array_equal(standardize(flat, np.arange(24.0) + 1), np.arange(24.0) + 1)
    with pytest.raises(TooFewSamples):
        fit_standardizer([np.zeros(24)])


def test_standardized_training_features_are_unit():
    x = np.random.default_rng(0).normal(3.0, 2.0, (30, 24))
    x[:, 5] = 1.5
    s = fit_standardizer(x)
    z = s.transform(x)
    kept = ~s.flagged
    assert list(np.nonzero(s.flagged)[0]) == [5]
    np.testing.assert_allclose(z[:, kept].mean(axis=0), 0.0, atol=1e-9)
    np.testing.assert_allclose(z[:, kept].std(axis=0, ddof=1), 1.0, atol=1e-9)
    np.testing.assert_array_equal(z[:, 5], 1.5)
    back = Standardizer.from_dict(s.to_dict())
    np.testing.assert_array_equal(back.transform(x), z)


def test_feature_table_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    samples = [LabeledSample(f"b{i}", rng.random(24), "unacceptable" if i % 2 else "acceptable",
                             1672531200.0 + 2 * i) for i in range(5)]
    samples.append(LabeledSample("c0", rng.random(24), "acceptable", None))
    path = tmp_path / "f.csv"
    write_feature_table(samples, path)
    header = path.read_text().splitlines()[0]
    assert header == "id,label,timestamp," + ",".join(FEATURE_NAMES)
    back = {s.id: s for s in read_feature_table(path)}
    for s in samples:
        np.testing.assert_array_equal(back[s.id].features, s.features)
        assert back[s.id].label == s.label and back[s.id].timestamp == s.timestamp


def test_labeled_sample_validation():
    with pytest.raises(ValueError):
        LabeledSample("x", np.zeros(23), "acceptable")
    with pytest.raises(ValueError):
        LabeledSample("x", np.zeros(24), "fine")
    assert LabeledSample("x", np.zeros(24), "unacceptable").positive


def test_timestamp_format():
    assert format_timestamp(1672531200.0) == "2023-01-01T00:00:00Z"
    assert parse_timestamp("2023-01-01T00:00:02Z") == 1672531202.0
    assert parse_timestamp("") is None
