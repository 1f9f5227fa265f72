"""Edge and contrast filter bank applied before image comparison."""
from __future__ import annotations

import enum
import math

import numpy as np
from scipy import ndimage

from .errors import ImageTooSmall
from .imgcore import as_gray, equalize_hist

SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
SOBEL_Y = SOBEL_X.T.copy()

MIN_FILTER_SIZE = 7
CANNY_HIGH_PERCENTILE = 90.0
CANNY_LOW_RATIO = 0.5
# gradients below this are summation round-off on flat regions, not edges
GRADIENT_FLOOR = 1e-12


class FilterId(enum.Enum):
    NO_FILTER = "no-filter"
    EQUAL_HIST = "equal-hist"
    SOBEL = "sobel"
    SOBEL_V = "sobel-v"
    SOBEL_H = "sobel-h"
    CANNY_2 = "canny-2"
    CANNY_2_5 = "canny-2.5"
    CANNY_3 = "canny-3"

    @property
    def index(self) -> int:
        return FILTERS.index(self)


FILTERS = tuple(FilterId)
CANNY_SIGMA = {FilterId.CANNY_2: 2.0, FilterId.CANNY_2_5: 2.5, FilterId.CANNY_3: 3.0}


def correlate3(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """3x3 cross-correlation with edge replication.

    Terms are accumulated in row-major kernel order, which makes the result
    reproducible term for term by a plain double loop.
    """
    height, width = img.shape
    padded = np.pad(img, 1, mode="edge")
    out = np.zeros_like(img)
    for di in range(3):
        for dj in range(3):
            out += kernel[di, dj] * padded[di:di + height, dj:dj + width]
    return out


def sobel_gradients(img) -> tuple[np.ndarray, np.ndarray]:
    """Horizontal and vertical Sobel derivatives (``gx`` grows to the right, ``gy`` downwards)."""
    arr = as_gray(img)
    if min(arr.shape) < 3:
        raise ImageTooSmall(f"sobel needs at least 3x3, got {arr.shape}")
    return correlate3(arr, SOBEL_X), correlate3(arr, SOBEL_Y)


def gaussian_kernel(sigma: float) -> np.ndarray:
    radius = math.ceil(3 * sigma)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def gaussian_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    # the normalized 2-D Gaussian is separable into two 1-D passes
    k = gaussian_kernel(sigma)
    out = ndimage.correlate1d(img, k, axis=0, mode="nearest")
    return ndimage.correlate1d(out, k, axis=1, mode="nearest")


def non_max_suppression(mag: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """Thin ridges to one pixel along the quantized gradient direction.

    A pixel survives when it is strictly larger than its backward neighbour
    and at least as large as its forward one, so plateaus two pixels wide
    keep exactly one pixel.
    """
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    sector = (np.floor((angle + 22.5) / 45.0).astype(np.intp)) % 4
    padded = np.pad(mag, 1, mode="constant")
    height, width = mag.shape

    def shifted(dy, dx):
        return padded[1 + dy:1 + dy + height, 1 + dx:1 + dx + width]

    # (dy, dx) of the forward neighbour per sector: 0, 45, 90, 135 degrees
    steps = ((0, 1), (1, 1), (1, 0), (1, -1))
    keep = np.zeros(mag.shape, dtype=bool)
    for s, (dy, dx) in enumerate(steps):
        sel = sector == s
        fwd = shifted(dy, dx)
        bwd = shifted(-dy, -dx)
        keep |= sel & (mag > bwd) & (mag >= fwd)
    return np.where(keep, mag, 0.0)


def hysteresis(thin: np.ndarray, low: float, high: float) -> np.ndarray:
    weak = thin >= low
    strong = thin >= high
    labels, n = ndimage.label(weak, structure=np.ones((3, 3), dtype=bool))
    if n == 0:
        return np.zeros(thin.shape, dtype=bool)
    has_strong = np.zeros(n + 1, dtype=bool)
    has_strong[labels[strong]] = True
    has_strong[0] = False
    return has_strong[labels]


def canny(img, sigma: float) -> np.ndarray:
    """Binary edge map in {0, 1}.

    Thresholds adapt to the image: ``high`` is the 90th percentile of the
    nonzero gradient magnitudes, ``low`` half of that.
    """
    arr = as_gray(img)
    blurred = gaussian_blur(arr, sigma)
    gx, gy = sobel_gradients(blurred)
    mag = _floored(np.hypot(gx, gy))
    nonzero = mag[mag > 0]
    if nonzero.size == 0:
        return np.zeros_like(arr)
    high = float(np.percentile(nonzero, CANNY_HIGH_PERCENTILE))
    low = CANNY_LOW_RATIO * high
    thin = non_max_suppression(mag, gx, gy)
    return hysteresis(thin, low, high).astype(np.float64)


def _floored(values: np.ndarray) -> np.ndarray:
    return np.where(values < GRADIENT_FLOOR, 0.0, values)


def apply_filter(img, fid: FilterId) -> np.ndarray:
    arr = as_gray(img)
    if min(arr.shape) < MIN_FILTER_SIZE:
        raise ImageTooSmall(f"filters need at least {MIN_FILTER_SIZE}px per side, got {arr.shape}")
    if fid is FilterId.NO_FILTER:
        return arr.copy()
    if fid is FilterId.EQUAL_HIST:
        return equalize_hist(arr)
    if fid in CANNY_SIGMA:
        return canny(arr, CANNY_SIGMA[fid])
    gx, gy = sobel_gradients(arr)
    if fid is FilterId.SOBEL_V:
        return _floored(np.abs(gx) / 4.0)
    if fid is FilterId.SOBEL_H:
        return _floored(np.abs(gy) / 4.0)
    # |grad| on [0, 1] input peaks at sqrt(20) < 4*sqrt(2)
    return _floored(np.hypot(gx, gy) / (4.0 * math.sqrt(2.0)))
