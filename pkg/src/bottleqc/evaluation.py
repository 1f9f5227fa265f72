"""Leave-one-out evaluation, confusion metrics and ROC analysis.

The positive class is ``unacceptable``; a score at or above the threshold
predicts positive.
"""
from __future__ import annotations

import csv
import os
import json
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from .classify import ClassifierConfig, ClassifierKind, train
from .errors import EmptyCounts, SingleClassDataset, TooFewSamples, UndefinedRate


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @classmethod
    def from_predictions(cls, positive, predicted) -> "ConfusionCounts":
        positive = np.asarray(positive, dtype=bool)
        predicted = np.asarray(predicted, dtype=bool)
        return cls(int((positive & predicted).sum()), int((~positive & predicted).sum()),
                   int((~positive & ~predicted).sum()), int((positive & ~predicted).sum()))


def accuracy(c: ConfusionCounts) -> float:
    if c.total == 0:
        raise EmptyCounts("no samples counted")
    return (c.tp + c.tn) / c.total


def sensitivity(c: ConfusionCounts) -> float:
    if c.tp + c.fn == 0:
        raise UndefinedRate("sensitivity needs at least one positive")
    return c.tp / (c.tp + c.fn)


def specificity(c: ConfusionCounts) -> float:
    if c.tn + c.fp == 0:
        raise UndefinedRate("specificity needs at least one negative")
    return c.tn / (c.tn + c.fp)


def false_positive_rate(c: ConfusionCounts) -> float:
    if c.tn + c.fp == 0:
        raise UndefinedRate("false positive rate needs at least one negative")
    return c.fp / (c.fp + c.tn)


def compute_metrics(c: ConfusionCounts) -> tuple[float, float, float, float]:
    """(accuracy, sensitivity, specificity, false positive rate)."""
    return accuracy(c), sensitivity(c), specificity(c), false_positive_rate(c)


def roc_points(scores, positive) -> list[tuple[float, float, float]]:
    """``(fpr, tpr, threshold)`` for every distinct score, plus both end points.

    The (0, 0) end carries threshold ``+inf``, (1, 1) carries ``-inf``.
    """
    scores = np.asarray(scores, dtype=np.float64)
    positive = np.asarray(positive, dtype=bool)
    n_pos = int(positive.sum())
    n_neg = len(positive) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassDataset("ROC needs both classes")
    points = [(0.0, 0.0, np.inf)]
    for t in np.unique(scores)[::-1]:
        hit = scores >= t
        points.append((float((hit & ~positive).sum() / n_neg), float((hit & positive).sum() / n_pos), float(t)))
    points.append((1.0, 1.0, -np.inf))
    points.sort(key=lambda p: (p[0], p[1]))
    return points


def roc_curve(scores, positive) -> list[tuple[float, float]]:
    return [(f, t) for f, t, _ in roc_points(scores, positive)]


def auc(roc) -> float:
    """Trapezoidal area under an ROC curve given as ordered ``(fpr, tpr)`` pairs."""
    pts = np.asarray(roc, dtype=np.float64)[:, :2]
    return float(np.sum(np.diff(pts[:, 0]) * (pts[1:, 1] + pts[:-1, 1]) / 2.0))


@dataclass
class SampleResult:
    id: str
    label: str
    score: float
    predicted: str


@dataclass
class EvalReport:
    kind: str
    counts: ConfusionCounts
    accuracy: float
    sensitivity: float
    specificity: float
    fpr: float
    roc: list
    auc: float
    threshold: float = 0.5
    per_sample: list = field(default_factory=list)

    def summary(self) -> dict:
        c = self.counts
        return {
            "kind": self.kind,
            "tp": c.tp, "fp": c.fp, "tn": c.tn, "fn": c.fn,
            "accuracy": self.accuracy,
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "fpr": self.fpr,
            "auc": self.auc,
            "threshold": self.threshold,
            "n": c.total,
        }

    def write(self, out_dir) -> None:
        """Write ``summary.json``, ``per_sample.csv`` and ``roc.csv`` into ``out_dir``."""
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "summary.json"), "w", encoding="utf-8") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        with open(os.path.join(out_dir, "per_sample.csv"), "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["id", "label", "score", "predicted"])
            for r in self.per_sample:
                w.writerow([r.id, r.label, repr(r.score), r.predicted])
        with open(os.path.join(out_dir, "roc.csv"), "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["fpr", "tpr", "threshold"])
            for f, t, th in self.roc:
                w.writerow([repr(f), repr(t), repr(th)])


def _fold(samples, i, kind, config, seed):
    model = train(kind, samples[:i] + samples[i + 1:], config, seed)
    return model.score(samples[i].features)


def loocv(samples, kind: ClassifierKind, config: ClassifierConfig = ClassifierConfig(), seed: int = 0,
          jobs: int = 1) -> EvalReport:
    """Hold out each sample once; every fold refits standardizer and model on the rest."""
    samples = sorted(samples, key=lambda s: s.id)
    if len(samples) < 2:
        raise TooFewSamples("LOOCV needs at least 2 samples")
    positive = np.array([s.positive for s in samples])
    if positive.all() or not positive.any():
        raise SingleClassDataset("LOOCV needs both classes")
    if jobs == 1:
        scores = [_fold(samples, i, kind, config, seed) for i in range(len(samples))]
    else:
        scores = Parallel(n_jobs=jobs)(delayed(_fold)(samples, i, kind, config, seed) for i in range(len(samples)))
    return report_from_scores(kind.value, samples, np.array(scores), config.threshold)


def report_from_scores(kind: str, samples, scores, threshold: float = 0.5) -> EvalReport:
    positive = np.array([s.positive for s in samples])
    predicted = scores >= threshold
    counts = ConfusionCounts.from_predictions(positive, predicted)
    acc, sens, spec, fpr = compute_metrics(counts)
    roc = roc_points(scores, positive)
    per_sample = [SampleResult(s.id, s.label, float(sc), "unacceptable" if p else "acceptable")
                  for s, sc, p in zip(samples, scores, predicted)]
    return EvalReport(kind, counts, acc, sens, spec, fpr, roc, auc(roc), threshold, per_sample)
