"""Image representation and basic raster operations.

Images are plain numpy arrays of float64 intensities in [0, 1]:
gray images have shape ``(height, width)``, color images
``(height, width, 3)`` in R, G, B order.
"""
from __future__ import annotations

import enum
import os
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import CorruptData, ImageNotFound, IoError, RoiOutOfBounds, UnsupportedFormat

REC601_WEIGHTS = (0.299, 0.587, 0.114)
N_BINS = 256


class GrayMode(enum.Enum):
    WEIGHTED_SUM = "weighted-sum"
    GREEN_ONLY = "green-only"


@dataclass(frozen=True)
class Roi:
    """Axis-aligned window: top-left ``(x, y)`` and extent ``(w, h)`` in pixels."""

    x: int
    y: int
    w: int
    h: int

    @classmethod
    def parse(cls, text: str) -> "Roi":
        parts = [int(p) for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected x,y,w,h, got {text!r}")
        if parts[0] < 0 or parts[1] < 0 or parts[2] < 1 or parts[3] < 1:
            raise ValueError(f"window needs x, y >= 0 and w, h >= 1, got {text!r}")
        return cls(*parts)

    def __str__(self) -> str:
        return f"{self.x},{self.y},{self.w},{self.h}"

    def check(self, shape) -> None:
        height, width = shape[:2]
        if self.w < 1 or self.h < 1 or self.x < 0 or self.y < 0:
            raise RoiOutOfBounds(f"invalid roi {self}")
        if self.x + self.w > width or self.y + self.h > height:
            raise RoiOutOfBounds(f"roi {self} exceeds image {width}x{height}")


def as_gray(img) -> np.ndarray:
    """Validate ``img`` as a gray image and return it as float64."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"expected a 2-D gray image, got shape {arr.shape}")
    return arr


# leading bytes of the formats we read; a file that starts like one of them
# but fails to decode is corrupt rather than unsupported
_SIGNATURES = (b"\x89PNG\r\n\x1a\n", b"P5", b"P6")


def _has_known_signature(path) -> bool:
    with open(path, "rb") as fh:
        head = fh.read(8)
    return any(head.startswith(sig) for sig in _SIGNATURES)


def load_image(path) -> np.ndarray:
    """Decode a PNG or binary PGM file into [0, 1] intensities (v -> v/255)."""
    path = os.fspath(path)
    if not os.path.exists(path):
        raise ImageNotFound(path)
    try:
        with Image.open(path) as im:
            if im.format not in ("PNG", "PPM"):
                raise UnsupportedFormat(f"{path}: format {im.format} not supported")
            im.load()
            if im.mode == "P":
                im = im.convert("RGB")
            if im.mode not in ("L", "RGB"):
                raise UnsupportedFormat(f"{path}: pixel mode {im.mode} not supported")
            data = np.asarray(im, dtype=np.uint8)
    except UnidentifiedImageError as exc:
        if _has_known_signature(path):
            raise CorruptData(f"{path}: {exc}") from exc
        raise UnsupportedFormat(f"{path}: {exc}") from exc
    except (OSError, SyntaxError, ValueError) as exc:
        if isinstance(exc, (UnsupportedFormat, ImageNotFound)):
            raise
        raise CorruptData(f"{path}: {exc}") from exc
    return data.astype(np.float64) / 255.0


def save_image(img, path) -> None:
    """Encode ``img`` as 8-bit PNG or PGM depending on the file extension."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 3 and arr.shape[2] == 3:
        mode = "RGB"
    elif arr.ndim == 2:
        mode = "L"
    else:
        raise ValueError(f"cannot encode array of shape {arr.shape}")
    data = np.rint(np.clip(arr, 0.0, 1.0) * 255.0).astype(np.uint8)
    path = os.fspath(path)
    ext = os.path.splitext(path)[1].lower()
    try:
        if ext == ".pgm":
            if mode != "L":
                raise UnsupportedFormat("PGM output requires a gray image")
            Image.fromarray(data, mode=mode).save(path, format="PPM")
        else:
            Image.fromarray(data, mode=mode).save(path, format="PNG", compress_level=6)
    except OSError as exc:
        raise IoError(f"{path}: {exc}") from exc


def to_gray(img, mode: GrayMode = GrayMode.WEIGHTED_SUM) -> np.ndarray:
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        return arr
    if mode is GrayMode.GREEN_ONLY:
        return arr[..., 1].copy()
    r, g, b = REC601_WEIGHTS
    out = r * arr[..., 0] + g * arr[..., 1] + b * arr[..., 2]
    # weights sum to one, so only rounding can leave [0, 1]
    return np.minimum(out, 1.0)


def quantize(img) -> np.ndarray:
    """Map intensities to integer histogram bins 0..255."""
    return np.rint(as_gray(img) * (N_BINS - 1)).astype(np.intp)


def equalize_hist(img) -> np.ndarray:
    arr = as_gray(img)
    bins = quantize(arr)
    hist = np.bincount(bins.ravel(), minlength=N_BINS)
    cdf = np.cumsum(hist)
    total = bins.size
    cdf_min = cdf[np.flatnonzero(hist)[0]]
    if total == cdf_min:
        return arr.copy()
    lut = np.rint((cdf - cdf_min) / (total - cdf_min) * (N_BINS - 1)) / (N_BINS - 1)
    return np.clip(lut, 0.0, 1.0)[bins]


def crop(img, roi: Roi) -> np.ndarray:
    arr = np.asarray(img)
    roi.check(arr.shape)
    return arr[roi.y:roi.y + roi.h, roi.x:roi.x + roi.w].copy()
