import csv

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bottleqc.errors import TooFewImages
from bottleqc.iqm import MetricId
from bottleqc.preselect import (EXCLUDED, POTENTIAL_ACCEPTABLE, POTENTIAL_UNACCEPTABLE, partition_scores,
                                preselect)
from bottleqc.synth import CorpusConfig, DefectSpec, Pose, default_window, render_clean, render_instance


def test_outliers_and_inliers():
    rng = np.random.default_rng(0)
    scores = np.concatenate([1.0 + rng.uniform(-0.01, 0.01, 100), [5.0, 5.0]])
    m, parts = partition_scores(scores)
    assert m == pytest.approx(1.078, abs=0.01)
    assert parts[-2:] == [POTENTIAL_UNACCEPTABLE] * 2
    assert parts[:100] == [POTENTIAL_ACCEPTABLE] * 100


def test_zero_mean_all_acceptable():
    m, parts = partition_scores(np.zeros(5))
    assert m == 0.0 and parts == [POTENTIAL_ACCEPTABLE] * 5


def test_errors():
    with pytest.raises(TooFewImages):
        partition_scores([1.0])
    with pytest.raises(ValueError):
        partition_scores([1.0, 2.0], hi=0.2, lo=0.8)
    with pytest.raises(TooFewImages):
        preselect([("a", np.zeros((64, 64)))], np.zeros((64, 64)))


def test_middle_band_excluded():
    _, parts = partition_scores([1.0, 1.0, 1.0, 1.5])
    # m = 1.125: 1.5 deviates by 0.375, between 0.2m and 0.8m
    assert parts == [POTENTIAL_ACCEPTABLE] * 3 + [EXCLUDED]


@settings(max_examples=50)
@given(st.lists(st.floats(0.01, 100.0), min_size=2, max_size=30), st.floats(0.01, 1000.0))
def test_scale_invariance(scores, c):
    _, a = partition_scores(scores)
    _, b = partition_scores([s * c for s in scores])
    m = np.mean(scores)
    # skip sets that sit on a threshold within rounding
    dev = np.abs(np.array(scores) - m) / m
    if np.any(np.isclose(dev, 0.8, atol=1e-9)) or np.any(np.isclose(dev, 0.2, atol=1e-9)):
        return
    assert a == b


def test_preselect_on_renders(tmp_path):
    # faint glare so one defect dominates a handful of images
    cfg = CorpusConfig(reflection_intensity=(0.0, 0.05))
    ref = render_clean(cfg, 1, Pose())
    window = default_window(cfg)
    images = [(f"ok{i}", render_clean(cfg, 10 + i)) for i in range(6)]
    images.append(("bad", render_instance(cfg, 99, defects=(DefectSpec("erasure", 0.4),)).image))
    for metric in (MetricId.MSE, MetricId.SSIM):
        report = preselect(images, ref, window, metric=metric, seed=0)
        groups = report.groups()
        assert "bad" in groups[POTENTIAL_UNACCEPTABLE]
        assert report.ids[int(np.argmax(report.scores))] == "bad"
        assert sorted(sum(groups.values(), [])) == sorted(i for i, _ in images)
        again = preselect(images, ref, window, metric=metric, seed=0)
        np.testing.assert_array_equal(report.scores, again.scores)
    report.write_table(tmp_path / "p.csv")
    rows = list(csv.reader(open(tmp_path / "p.csv")))
    assert rows[0] == ["id", "score", "partition"] and len(rows) == 8
