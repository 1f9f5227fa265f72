"""Keypoint-based registration of a test image onto the reference image."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields

import numpy as np

from ..errors import QCError
from ..imgcore import Roi, as_gray, crop
from .homography import (
    dlt,
    estimate_homography,
    project,
    reprojection_errors,
    rotation_from_homography,
    rotation_matrix,
    warp_image,
)
from .orb import Keypoint, Match, Pyramid, compute_descriptors, detect_keypoints, match_descriptors

__all__ = [
    "AlignConfig", "AlignmentResult", "ImageFeatures", "Keypoint", "Match", "Pyramid",
    "align", "compute_descriptors", "detect_keypoints", "dlt", "estimate_homography",
    "extract_orb", "match_descriptors", "project", "reprojection_errors",
    "rotation_from_homography", "rotation_matrix", "warp_image",
]


@dataclass(frozen=True)
class AlignConfig:
    max_kp: int = 500
    fast_threshold: float = 0.08
    pyramid_levels: int = 3
    scale_factor: float = 1.2
    harris_k: float = 0.04
    ratio: float = 0.75
    ransac_px: float = 3.0
    ransac_confidence: float = 0.99
    ransac_max_iters: int = 2000
    min_inliers: int = 15

    @classmethod
    def from_mapping(cls, values) -> "AlignConfig":
        unknown = set(values) - {f.name for f in fields(cls)}
        if unknown:
            raise ValueError(f"unknown alignment settings: {sorted(unknown)}")
        defaults = cls()
        return cls(**{k: type(getattr(defaults, k))(v) for k, v in values.items()})

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ImageFeatures:
    keypoints: list
    descriptors: np.ndarray

    def __len__(self):
        return len(self.keypoints)

    def points(self) -> np.ndarray:
        return np.array([(kp.x, kp.y) for kp in self.keypoints], dtype=np.float64).reshape(-1, 2)


@dataclass
class AlignmentResult:
    homography: np.ndarray
    inlier_count: int
    total_matches: int
    rotation_deg: float
    warped: np.ndarray
    succeeded: bool

    def to_record(self) -> dict:
        return {
            "rotation_deg": self.rotation_deg,
            "inliers": self.inlier_count,
            "matches": self.total_matches,
            "succeeded": self.succeeded,
        }


def extract_orb(img, cfg: AlignConfig = AlignConfig()) -> ImageFeatures:
    pyramid = Pyramid(img, cfg.pyramid_levels, cfg.scale_factor)
    kps = detect_keypoints(pyramid, cfg.max_kp, cfg.fast_threshold, harris_k=cfg.harris_k)
    kept, desc = compute_descriptors(pyramid, kps)
    return ImageFeatures(kept, desc)


def align(test, ref, cfg: AlignConfig = AlignConfig(), seed: int = 0,
          ref_features: ImageFeatures | None = None, region: Roi | None = None) -> AlignmentResult:
    """Register ``test`` onto ``ref``.

    Failure (too few matches or inliers) is reported through
    ``succeeded=False`` with the test image returned unwarped, so callers
    can carry on with unaligned data.  With ``region`` only that part of the
    reference frame is rendered into ``warped``.
    """
    test = as_gray(test)
    ref = as_gray(ref)
    if region is not None:
        region.check(ref.shape)
        region.check(test.shape)
    if ref_features is None:
        ref_features = extract_orb(ref, cfg)
    test_features = extract_orb(test, cfg)

    def failed(n_matches, n_inliers=0):
        unwarped = test if region is None else crop(test, region)
        return AlignmentResult(np.eye(3), n_inliers, n_matches, 0.0, unwarped, False)

    if len(test_features) == 0 or len(ref_features) == 0:
        return failed(0)
    matches = match_descriptors(test_features.descriptors, ref_features.descriptors, cfg.ratio)
    if len(matches) < 4:
        return failed(len(matches))
    src = test_features.points()[[m.query for m in matches]]
    dst = ref_features.points()[[m.train for m in matches]]
    try:
        h, mask = estimate_homography(src, dst, seed=seed, threshold=cfg.ransac_px,
                                      confidence=cfg.ransac_confidence, max_iters=cfg.ransac_max_iters)
    except (QCError, np.linalg.LinAlgError):
        return failed(len(matches))
    inliers = int(mask.sum())
    if inliers < cfg.min_inliers:
        return failed(len(matches), inliers)
    rotation = rotation_from_homography(np.linalg.inv(h))
    if region is None:
        warped = warp_image(test, h, ref.shape)
    else:
        warped = warp_image(test, h, (region.h, region.w), origin=(region.x, region.y))
    return AlignmentResult(h, inliers, len(matches), rotation, warped, True)
