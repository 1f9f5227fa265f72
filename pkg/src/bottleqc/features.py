"""Filter x metric comparison vectors and feature standardization."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .align import AlignConfig, AlignmentResult, ImageFeatures, align, extract_orb
from .errors import TooFewSamples
from .filters import FILTERS, FilterId, apply_filter
from .imgcore import Roi, as_gray, crop
from .iqm import METRICS, MetricId, compare

N_FEATURES = len(FILTERS) * len(METRICS)
FEATURE_NAMES = tuple(f"{f.value}-{m.value}" for f in FILTERS for m in METRICS)
LABELS = ("acceptable", "unacceptable")
# filters see the window plus this margin, which covers the reach of every
# local operator in the bank (largest Gaussian radius 9, Sobel 1, thinning 1)
SUPPORT_MARGIN = 16


def feature_index(fid: FilterId, metric: MetricId) -> int:
    return len(METRICS) * fid.index + metric.index


@dataclass
class LabeledSample:
    id: str
    features: np.ndarray
    label: str
    timestamp: float | None = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.shape != (N_FEATURES,):
            raise ValueError(f"{self.id}: expected {N_FEATURES} features, got {self.features.shape}")
        if self.label not in LABELS:
            raise ValueError(f"{self.id}: unknown label {self.label!r}")

    @property
    def positive(self) -> bool:
        return self.label == "unacceptable"


def support_region(window: Roi, shape, margin: int = SUPPORT_MARGIN) -> Roi:
    """``window`` grown by ``margin`` on every side, clipped to ``shape``."""
    height, width = shape[:2]
    x0, y0 = max(window.x - margin, 0), max(window.y - margin, 0)
    x1 = min(window.x + window.w + margin, width)
    y1 = min(window.y + window.h + margin, height)
    return Roi(x0, y0, x1 - x0, y1 - y0)


def filtered_window(support_img, fid: FilterId, window: Roi, support: Roi) -> np.ndarray:
    """Filter an image of the support region and cut out the window."""
    inner = Roi(window.x - support.x, window.y - support.y, window.w, window.h)
    return crop(apply_filter(support_img, fid), inner)


class Reference:
    """Reference image with its keypoints and filtered window crops cached."""

    def __init__(self, image, window: Roi, align_cfg: AlignConfig = AlignConfig()):
        self.image = as_gray(image)
        window.check(self.image.shape)
        self.window = window
        self.support = support_region(window, self.image.shape)
        self.align_cfg = align_cfg
        self._orb: ImageFeatures | None = None
        self._crops: dict[FilterId, np.ndarray] = {}

    @property
    def orb(self) -> ImageFeatures:
        if self._orb is None:
            self._orb = extract_orb(self.image, self.align_cfg)
        return self._orb

    def filtered_test(self, test, fid: FilterId) -> np.ndarray:
        """Filtered window of ``test``, given as a full frame or as the support region."""
        test = as_gray(test)
        if test.shape != (self.support.h, self.support.w):
            test = crop(test, self.support)
        return filtered_window(test, fid, self.window, self.support)

    def crop(self, fid: FilterId) -> np.ndarray:
        if fid not in self._crops:
            self._crops[fid] = filtered_window(crop(self.image, self.support), fid, self.window, self.support)
        return self._crops[fid]


def compare_windows(test, reference: Reference) -> np.ndarray:
    """24-vector for a test image already in the reference frame.

    ``test`` is either a full frame or just the reference's support region.
    """
    test = as_gray(test)
    out = np.empty(N_FEATURES)
    for fid in FILTERS:
        t = reference.filtered_test(test, fid)
        r = reference.crop(fid)
        for metric in METRICS:
            out[feature_index(fid, metric)] = compare(t, r, metric)
    return out


def extract_features(test, ref, window: Roi | None = None, align_cfg: AlignConfig = AlignConfig(),
                     use_alignment: bool = True, seed: int = 0) -> tuple[np.ndarray, AlignmentResult | None]:
    """Align ``test`` to ``ref`` (optionally), filter both and compare inside ``window``.

    ``ref`` may be a prepared :class:`Reference`, in which case ``window``
    and ``align_cfg`` come from it.
    """
    reference = ref if isinstance(ref, Reference) else Reference(ref, window, align_cfg)
    test = as_gray(test)
    result = None
    if use_alignment:
        result = align(test, reference.image, reference.align_cfg, seed, ref_features=reference.orb,
                       region=reference.support)
        test = result.warped
    return compare_windows(test, reference), result


@dataclass
class Standardizer:
    mean: np.ndarray
    std: np.ndarray
    flagged: np.ndarray = field(default=None)

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.std = np.asarray(self.std, dtype=np.float64)
        if self.flagged is None:
            self.flagged = zero_variance(self.mean, self.std)
        self.flagged = np.asarray(self.flagged, dtype=bool)

    def transform(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        scale = np.where(self.flagged, 1.0, self.std)
        shift = np.where(self.flagged, 0.0, self.mean)
        return (x - shift) / scale

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist(), "flagged": self.flagged.tolist()}

    @classmethod
    def from_dict(cls, d) -> "Standardizer":
        return cls(np.array(d["mean"]), np.array(d["std"]), np.array(d["flagged"], dtype=bool))


def zero_variance(mean, std) -> np.ndarray:
    return std <= 1e-12 * np.maximum(1.0, np.abs(mean))


def fit_standardizer(samples) -> Standardizer:
    x = np.asarray([np.asarray(s, dtype=np.float64) for s in samples])
    if x.ndim != 2 or x.shape[0] < 2:
        raise TooFewSamples("standardizer needs at least 2 samples")
    return Standardizer(x.mean(axis=0), x.std(axis=0, ddof=1))


def standardize(s: Standardizer, fv) -> np.ndarray:
    return s.transform(fv)


# --- feature tables ------------------------------------------------------

def format_timestamp(ts: float | None) -> str:
    if ts is None:
        return ""
    return datetime.fromtimestamp(ts, tz=timezone.utc).isoformat().replace("+00:00", "Z")


def parse_timestamp(text: str) -> float | None:
    text = text.strip()
    if not text:
        return None
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def write_feature_table(samples, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "label", "timestamp", *FEATURE_NAMES])
        for s in sorted(samples, key=lambda s: s.id):
            writer.writerow([s.id, s.label, format_timestamp(s.timestamp), *(repr(float(v)) for v in s.features)])


def read_feature_table(path) -> list[LabeledSample]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header[3:]) != FEATURE_NAMES or header[:3] != ["id", "label", "timestamp"]:
            raise ValueError(f"{path}: unexpected feature table header")
        samples = [LabeledSample(row[0], [float(v) for v in row[3:]], row[1], parse_timestamp(row[2]))
                   for row in reader if row]
    ids = [s.id for s in samples]
    if len(set(ids)) != len(ids):
        raise ValueError(f"{path}: duplicate sample ids")
    if not all(math.isfinite(v) for s in samples for v in s.features):
        raise ValueError(f"{path}: non-finite feature values")
    return samples
