import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bottleqc.classify import (KINDS, ClassifierConfig, ClassifierKind, TrainedModel, load_model, predict,
                               samples_from_arrays, save_model, score, train)
from bottleqc.classify.knn import knn_score
from bottleqc.classify.svm import rbf_kernel, smo
from bottleqc.classify.tree import TreeBuilder, forest_votes, tree_predict
from bottleqc.errors import CorruptModel, IoError, SingleClassTrainingSet, TooFewSamples, VersionMismatch
from bottleqc.features import LabeledSample
from conftest import make_blobs


@pytest.mark.parametrize("kind", KINDS)
def test_separable_blobs(kind, blobs):
    model = train(kind, blobs, seed=0)
    for s in blobs:
        assert model.predict(s.features) == s.label
    x_test, pos_test = make_blobs(20, seed=1)
    for row, p in zip(x_test, pos_test):
        assert (model.predict(row) == "unacceptable") == p


@pytest.mark.parametrize("kind", KINDS)
def test_deterministic_and_order_free(kind, blobs):
    a = train(kind, blobs, seed=3)
    b = train(kind, list(reversed(blobs)), seed=3)
    assert a.dumps() == b.dumps()


@pytest.mark.parametrize("kind", KINDS)
def test_scores_in_unit_interval_and_threshold(kind, blobs):
    model = train(kind, blobs, seed=0)
    x = np.random.default_rng(2).normal(2.0, 3.0, (100, 24))
    batch = model.score_many(x)
    assert np.all((batch >= 0) & (batch <= 1))
    for row, sb in zip(x, batch):
        si = score(model, row)
        assert si == pytest.approx(sb, abs=1e-12)
        assert (predict(model, row) == "unacceptable") == (si >= 0.5)
        for t in (0.1, 0.5, 0.9):
            assert (model.predict(row, t) == "unacceptable") == (si >= t)


@pytest.mark.parametrize("kind", KINDS)
def test_save_load_round_trip(kind, blobs, tmp_path):
    model = train(kind, blobs, seed=0)
    path = tmp_path / "m.json"
    save_model(model, path)
    loaded = load_model(path)
    x = np.random.default_rng(4).normal(2.0, 3.0, (100, 24))
    np.testing.assert_array_equal(loaded.score_many(x), model.score_many(x))
    assert loaded.dumps() == model.dumps()


def test_model_file_errors(blobs, tmp_path):
    model = train(ClassifierKind.KNN, blobs)
    doc = model.to_document()
    assert {"format_version", "kind", "seed", "standardizer", "params", "checksum"} <= set(doc)
    tampered = dict(doc, checksum="0" * 64)
    path = tmp_path / "t.json"
    path.write_text(json.dumps(tampered))
    with pytest.raises(CorruptModel):
        load_model(path)
    edited = json.loads(model.dumps())
    edited["threshold"] = 0.1
    path.write_text(json.dumps(edited))
    with pytest.raises(CorruptModel):
        load_model(path)
    newer = dict(doc, format_version=doc["format_version"] + 1)
    path.write_text(json.dumps(newer))
    with pytest.raises(VersionMismatch):
        load_model(path)
    path.write_text("{not json")
    with pytest.raises(CorruptModel):
        load_model(path)
    with pytest.raises(IoError):
        load_model(tmp_path / "missing.json")
    with pytest.raises(IoError):
        save_model(model, tmp_path / "no" / "m.json")


@pytest.mark.parametrize("kind", [ClassifierKind.SVM, ClassifierKind.NEURAL_NET])
def test_single_class_rejected(kind):
    x, _ = make_blobs(10)
    with pytest.raises(SingleClassTrainingSet):
        train(kind, samples_from_arrays(x, np.zeros(10, dtype=bool)))


def test_empty_training_set():
    with pytest.raises(TooFewSamples):
        train(ClassifierKind.KNN, [])


def test_knn_single_point():
    p = np.full(24, 1.0)
    model = train(ClassifierKind.KNN, [LabeledSample("p", p, "unacceptable")], ClassifierConfig(knn_k=1))
    assert model.predict(p + 0.01) == "unacceptable"


def test_knn_fraction_and_ties():
    train_x = np.array([[0.0], [1.0], [2.0], [3.0], [4.0], [10.0], [11.0]])
    pos = np.array([1, 1, 1, 0, 0, 1, 1], dtype=float)
    assert knn_score(train_x, pos, np.array([[2.0]]), 5)[0] == pytest.approx(0.6)
    # equal distances: the lower index wins
    tie_x = np.array([[-1.0], [1.0]])
    assert knn_score(tie_x, np.array([1.0, 0.0]), np.array([[0.0]]), 1)[0] == 1.0
    assert knn_score(tie_x, np.array([0.0, 1.0]), np.array([[0.0]]), 1)[0] == 0.0


def test_forest_vote_fraction():
    leaf_pos = {"feature": [-1], "threshold": [0.0], "left": [-1], "right": [-1], "value": [1.0], "weight": [1]}
    leaf_neg = dict(leaf_pos, value=[0.0])
    trees = [leaf_pos] * 87 + [leaf_neg] * 13
    assert forest_votes(trees, np.zeros((1, 24)))[0] == pytest.approx(0.87)


def test_svm_margin_zero_is_half(blobs):
    model = train(ClassifierKind.SVM, blobs)
    params = dict(model.params, dual_coef=np.zeros_like(model.params["dual_coef"]), rho=0.0)
    neutral = TrainedModel(ClassifierKind.SVM, model.standardizer, params, 0)
    assert neutral.score(np.zeros(24)) == 0.5


def test_smo_satisfies_kkt():
    x, positive = make_blobs(30, d=3, gap=1.0, seed=5)
    y = np.where(positive, 1.0, -1.0)
    k = rbf_kernel(x, x, 1 / 3)
    alpha, rho = smo(k, y, c=1.0, tol=1e-6)
    assert abs(alpha @ y) < 1e-9
    assert np.all((alpha >= -1e-12) & (alpha <= 1 + 1e-12))
    f = k @ (alpha * y) - rho
    margin = y * f
    assert np.all(margin[alpha < 1e-8] >= 1 - 1e-3)
    assert np.all(margin[alpha > 1 - 1e-8] <= 1 + 1e-3)


def test_single_tree_forest_equals_decision_tree(blobs):
    cfg = ClassifierConfig(forest_trees=1, forest_bootstrap=False, forest_max_features=24)
    x, positive = make_blobs(60, gap=1.0, seed=7)
    samples = samples_from_arrays(x, positive)
    forest = train(ClassifierKind.RANDOM_FOREST, samples, cfg, seed=0)
    tree = train(ClassifierKind.DECISION_TREE, samples, cfg, seed=0)
    assert forest.params["trees"][0] == tree.params["tree"]
    probe = np.random.default_rng(0).normal(0.5, 1.0, (50, 24))
    np.testing.assert_array_equal(forest.score_many(probe), tree.score_many(probe))


def test_tree_tie_breaks_on_lowest_feature():
    x = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [1.0, 1.0]])
    tree = TreeBuilder(max_depth=3, min_split=2).build(x, np.array([False, False, True, True]))
    assert tree["feature"][0] == 0
    assert tree["threshold"][0] == pytest.approx(0.5)
    np.testing.assert_array_equal(tree_predict(tree, x), [0, 0, 1, 1])


def test_config_mapping():
    cfg = ClassifierConfig.from_mapping({"knn_k": 3})
    assert cfg.knn_k == 3
    with pytest.raises(ValueError):
        ClassifierConfig.from_mapping({"bogus": 1})


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_forest_seeds_are_reproducible(seed):
    x, positive = make_blobs(20, gap=0.5, seed=seed % 1000)
    samples = samples_from_arrays(x, positive)
    cfg = ClassifierConfig(forest_trees=5)
    a = train(ClassifierKind.RANDOM_FOREST, samples, cfg, seed)
    b = train(ClassifierKind.RANDOM_FOREST, samples, cfg, seed)
    assert a.dumps() == b.dumps()
