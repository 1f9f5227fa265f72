"""Full-reference image quality metrics: MSE, NRMSE and SSIM."""
from __future__ import annotations

import enum

import numpy as np
from scipy import ndimage

from .errors import DimensionMismatch, ImageTooSmall, ZeroReference
from .imgcore import as_gray

SSIM_WINDOW = 7
DATA_RANGE = 1.0
SSIM_K1 = 0.01
SSIM_K2 = 0.03


class MetricId(enum.Enum):
    MSE = "mse"
    NRMSE = "nrmse"
    SSIM = "ssim"

    @property
    def index(self) -> int:
        return METRICS.index(self)


METRICS = tuple(MetricId)


def _pair(a, b):
    a = as_gray(a)
    b = as_gray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    return a, b


def mse(a, b) -> float:
    a, b = _pair(a, b)
    return float(np.mean((a - b) ** 2))


def nrmse(test, ref) -> float:
    """Root MSE normalized by the root mean square of the reference."""
    test, ref = _pair(test, ref)
    denom = float(np.mean(ref ** 2))
    if denom == 0.0:
        raise ZeroReference("reference image is all zero")
    return float(np.sqrt(np.mean((test - ref) ** 2) / denom))


def ssim_map(a, b, window: int = SSIM_WINDOW) -> np.ndarray:
    """Per-window SSIM over every fully contained ``window`` x ``window`` block."""
    a, b = _pair(a, b)
    if min(a.shape) < window:
        raise ImageTooSmall(f"ssim needs at least {window}px per side, got {a.shape}")
    c1 = (SSIM_K1 * DATA_RANGE) ** 2
    c2 = (SSIM_K2 * DATA_RANGE) ** 2
    n = window * window
    half = window // 2
    valid = (slice(half, a.shape[0] - half), slice(half, a.shape[1] - half))

    def mean(x):
        return ndimage.uniform_filter(x, size=window, mode="nearest")[valid]

    mu_a, mu_b = mean(a), mean(b)
    # unbiased estimators inside each window
    scale = n / (n - 1)
    var_a = scale * (mean(a * a) - mu_a * mu_a)
    var_b = scale * (mean(b * b) - mu_b * mu_b)
    cov = scale * (mean(a * b) - mu_a * mu_b)
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)
    return num / den


def ssim(a, b) -> float:
    return float(np.mean(ssim_map(a, b)))


def compare(test, ref, metric: MetricId) -> float:
    if metric is MetricId.MSE:
        return mse(test, ref)
    if metric is MetricId.NRMSE:
        return nrmse(test, ref)
    return ssim(test, ref)
