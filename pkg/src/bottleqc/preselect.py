"""Unsupervised triage of unlabelled images by distance to the reference.

Each image gets a distance score; images whose score deviates from the
corpus mean by more than ``hi`` times the mean are flagged as potentially
unacceptable, those within ``lo`` times the mean as potentially acceptable,
and the rest are left out of labelling.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .align import AlignConfig, align
from .errors import TooFewImages
from .features import Reference
from .filters import FilterId
from .imgcore import Roi, as_gray
from .iqm import MetricId, compare

POTENTIAL_UNACCEPTABLE = "potential_unacceptable"
POTENTIAL_ACCEPTABLE = "potential_acceptable"
EXCLUDED = "excluded"


@dataclass
class PreselectReport:
    ids: list
    scores: np.ndarray
    mean_score: float
    partition: list

    def groups(self) -> dict:
        out = {POTENTIAL_UNACCEPTABLE: [], POTENTIAL_ACCEPTABLE: [], EXCLUDED: []}
        for i, part in zip(self.ids, self.partition):
            out[part].append(i)
        return out

    def write_table(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["id", "score", "partition"])
            for i, s, p in zip(self.ids, self.scores, self.partition):
                w.writerow([i, repr(float(s)), p])


def partition_scores(scores, hi: float = 0.8, lo: float = 0.2) -> tuple[float, list[str]]:
    scores = np.asarray(scores, dtype=np.float64)
    if len(scores) < 2:
        raise TooFewImages("preselection needs at least 2 images")
    if not hi > lo > 0:
        raise ValueError("thresholds must satisfy hi > lo > 0")
    m = float(scores.mean())
    if m == 0.0:
        # nothing differs from the reference at all
        return m, [POTENTIAL_ACCEPTABLE] * len(scores)
    dev = np.abs(scores - m)
    parts = []
    for d in dev:
        if d > hi * m:
            parts.append(POTENTIAL_UNACCEPTABLE)
        elif d < lo * m:
            parts.append(POTENTIAL_ACCEPTABLE)
        else:
            parts.append(EXCLUDED)
    return m, parts


def distance_score(test, reference: Reference, metric: MetricId, fid: FilterId) -> float:
    """Distance inside the reference window; SSIM similarity becomes ``1 - SSIM``."""
    t = reference.filtered_test(test, fid)
    value = compare(t, reference.crop(fid), metric)
    return 1.0 - value if metric is MetricId.SSIM else value


def preselect(images, ref, window: Roi | None = None, metric: MetricId = MetricId.MSE, hi: float = 0.8,
              lo: float = 0.2, align_cfg: AlignConfig = AlignConfig(), seed: int = 0,
              filter_id: FilterId = FilterId.NO_FILTER, use_alignment: bool = True) -> PreselectReport:
    """Score ``images`` (``(id, image)`` pairs) and partition them.

    ``ref`` is a gray image or a prepared :class:`Reference`.
    """
    images = list(images)
    if len(images) < 2:
        raise TooFewImages("preselection needs at least 2 images")
    if not hi > lo > 0:
        raise ValueError("thresholds must satisfy hi > lo > 0")
    reference = ref if isinstance(ref, Reference) else Reference(ref, window, align_cfg)
    ids, scores = [], []
    for image_id, img in images:
        img = as_gray(img)
        if use_alignment:
            img = align(img, reference.image, reference.align_cfg, seed, reference.orb, reference.support).warped
        ids.append(image_id)
        scores.append(distance_score(img, reference, metric, filter_id))
    scores = np.array(scores)
    m, parts = partition_scores(scores, hi, lo)
    return PreselectReport(ids, scores, m, parts)
