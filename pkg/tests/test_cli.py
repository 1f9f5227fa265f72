import json
import math

import pytest

from bottleqc.classify import ClassifierConfig, ClassifierKind, samples_from_arrays
from bottleqc.cli import run
from bottleqc.evaluation import loocv
from bottleqc.features import write_feature_table
from bottleqc.monitor import RotationSample, write_series

from conftest import make_blobs


def _last_json(capsys):
    out = capsys.readouterr().out.strip().splitlines()
    return json.loads(out[-1])


@pytest.fixture
def table(tmp_path):
    path = tmp_path / "features.csv"
    write_feature_table(samples_from_arrays(*make_blobs(n=16, gap=6.0, seed=3)), path)
    return path


def test_unknown_flag_is_usage_error(capsys):
    assert run(["eval", "--bogus"]) == 2


def test_missing_subcommand_is_usage_error(capsys):
    assert run([]) == 2


def test_help_exits_zero(capsys):
    assert run(["--help"]) == 0


def test_missing_file_is_operational_error(tmp_path, capsys):
    assert run(["eval", "--features", str(tmp_path / "absent.csv"), "--kind", "svm"]) == 1
    assert "error" in capsys.readouterr().err


def test_missing_kind_is_usage_error(table, capsys):
    assert run(["eval", "--features", str(table)]) == 2


def test_bad_config_is_usage_error(table, tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("[1, 2]")
    assert run(["eval", "--features", str(table), "--kind", "svm", "--config", str(cfg)]) == 2


def test_eval_matches_library(table, tmp_path, capsys):
    from bottleqc.features import read_feature_table
    assert run(["eval", "--features", str(table), "--kind", "knn", "--out", str(tmp_path / "ev")]) == 0
    summary = _last_json(capsys)
    report = loocv(read_feature_table(table), ClassifierKind.KNN, ClassifierConfig(), 0, 1)
    assert summary["accuracy"] == report.accuracy
    assert summary["auc"] == report.auc
    on_disk = json.loads((tmp_path / "ev" / "summary.json").read_text())
    assert on_disk["tp"] == report.counts.tp
    assert (tmp_path / "ev" / "roc.csv").exists()
    assert (tmp_path / "ev" / "per_sample.csv").exists()


def test_flag_overrides_config(table, tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"kind": "decision-tree"}))
    assert run(["eval", "--features", str(table), "--config", str(cfg)]) == 0
    assert _last_json(capsys)["kind"] == "decision-tree"
    assert run(["eval", "--features", str(table), "--config", str(cfg), "--kind", "knn"]) == 0
    assert _last_json(capsys)["kind"] == "knn"


def test_train_writes_loadable_model(table, tmp_path, capsys):
    from bottleqc.classify import load_model
    out = tmp_path / "model.json"
    assert run(["train", "--features", str(table), "--kind", "random-forest", "--out", str(out)]) == 0
    assert _last_json(capsys)["samples"] == 16
    assert load_model(out).kind == ClassifierKind.RANDOM_FOREST


def test_monitor_recovers_sinusoid(tmp_path, capsys):
    omega = 2 * math.pi / 60
    series = [RotationSample(1.0e9 + 2.0 * i, 2.0 * math.sin(omega * 2.0 * i + 0.3) + 0.5) for i in range(120)]
    path = tmp_path / "series.csv"
    write_series(series, path)
    assert run(["monitor", "--series", str(path), "--out", str(tmp_path / "flags.csv")]) == 0
    summary = _last_json(capsys)
    assert summary["amplitude_deg"] == pytest.approx(2.0, abs=0.05)
    assert summary["flagged"] == 0
    assert (tmp_path / "flags.csv").exists()


def test_monitor_omega_bounds_go_together(tmp_path, capsys):
    path = tmp_path / "series.csv"
    write_series([RotationSample(float(i), 0.0) for i in range(10)], path)
    assert run(["monitor", "--series", str(path), "--omega-min", "0.01"]) == 2
