"""Glue between the corpus on disk, feature extraction and trained models."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass

from joblib import Parallel, delayed

from .align import AlignConfig
from .classify import TrainedModel
from .filters import FILTERS
from .features import LabeledSample, Reference, extract_features
from .imgcore import GrayMode, Roi, load_image, to_gray
from .synth import ManifestEntry, load_manifest


def load_gray(path, mode: GrayMode = GrayMode.WEIGHTED_SUM):
    return to_gray(load_image(path), mode)


@dataclass
class Corpus:
    root: str
    entries: list
    reference_path: str
    window: Roi

    @classmethod
    def open(cls, root) -> "Corpus":
        root = os.fspath(root)
        with open(os.path.join(root, "corpus.json"), encoding="utf-8") as fh:
            meta = json.load(fh)
        entries = load_manifest(os.path.join(root, meta.get("manifest", "manifest.jsonl")))
        return cls(root, entries, os.path.join(root, meta["reference"]), Roi(*meta["window"]))

    def image_path(self, entry: ManifestEntry) -> str:
        return os.path.join(self.root, entry.path)


def _extract_one(path, entry_id, label, timestamp, reference, use_alignment, seed, mode):
    fv, result = extract_features(load_gray(path, mode), reference, use_alignment=use_alignment, seed=seed)
    record = {"id": entry_id, "timestamp": timestamp}
    if result is not None:
        record.update(result.to_record())
    return LabeledSample(entry_id, fv, label, timestamp), record


def extract_dataset(corpus: Corpus, reference: Reference, use_alignment: bool = True, seed: int = 0,
                    jobs: int = 1, mode: GrayMode = GrayMode.WEIGHTED_SUM):
    """Feature samples and alignment records for every manifest entry, in id order."""
    entries = sorted(corpus.entries, key=lambda e: e.id)
    args = [(corpus.image_path(e), e.id, e.label, e.timestamp, reference, use_alignment, seed, mode) for e in entries]
    if jobs == 1:
        out = [_extract_one(*a) for a in args]
    else:
        out = Parallel(n_jobs=jobs)(delayed(_extract_one)(*a) for a in args)
    return [s for s, _ in out], [r for _, r in out]


class Inspector:
    """Single-image decision: align, filter, compare and classify."""

    def __init__(self, model: TrainedModel, reference: Reference, use_alignment: bool = True, seed: int = 0):
        self.model = model
        self.reference = reference
        self.use_alignment = use_alignment
        self.seed = seed
        # warm the reference caches so per-image latency excludes them
        if use_alignment:
            _ = reference.orb
        for fid in FILTERS:
            reference.crop(fid)

    def classify(self, img):
        fv, result = extract_features(img, self.reference, use_alignment=self.use_alignment, seed=self.seed)
        s = self.model.score(fv)
        label = "unacceptable" if s >= self.model.threshold else "acceptable"
        return label, s, result


def default_align_config(values: dict | None) -> AlignConfig:
    return AlignConfig.from_mapping(values or {})
