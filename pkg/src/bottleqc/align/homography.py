"""Homography estimation (normalized DLT + RANSAC), warping and rotation extraction."""
from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from ..errors import DegenerateConfiguration, SingularHomography, TooFewMatches
from ..imgcore import as_gray

MIN_DET = 1e-12


def project(h: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Apply ``h`` to ``(n, 2)`` points; points mapped to infinity become inf."""
    pts = np.asarray(pts, dtype=np.float64)
    homog = pts @ h[:, :2].T + h[:, 2]
    w = homog[:, 2:3]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = homog[:, :2] / w
    out[np.abs(w[:, 0]) < 1e-15] = np.inf
    return out


def _normalizer(pts: np.ndarray) -> np.ndarray:
    centroid = pts.mean(axis=0)
    mean_dist = np.sqrt(((pts - centroid) ** 2).sum(axis=1)).mean()
    s = math.sqrt(2.0) / mean_dist if mean_dist > 0 else 1.0
    return np.array([[s, 0.0, -s * centroid[0]], [0.0, s, -s * centroid[1]], [0.0, 0.0, 1.0]])


def dlt(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Normalized direct linear transform mapping ``src`` onto ``dst`` (h33 = 1)."""
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    if len(src) < 4:
        raise TooFewMatches(f"need 4 correspondences, got {len(src)}")
    t_src, t_dst = _normalizer(src), _normalizer(dst)
    s = src @ t_src[:2, :2].T + t_src[:2, 2]
    d = dst @ t_dst[:2, :2].T + t_dst[:2, 2]
    n = len(s)
    a = np.zeros((2 * n, 9))
    x, y = s[:, 0], s[:, 1]
    u, v = d[:, 0], d[:, 1]
    a[0::2, 0], a[0::2, 1], a[0::2, 2] = -x, -y, -1.0
    a[0::2, 6], a[0::2, 7], a[0::2, 8] = u * x, u * y, u
    a[1::2, 3], a[1::2, 4], a[1::2, 5] = -x, -y, -1.0
    a[1::2, 6], a[1::2, 7], a[1::2, 8] = v * x, v * y, v
    _, _, vt = np.linalg.svd(a)
    hn = vt[-1].reshape(3, 3)
    h = np.linalg.solve(t_dst, hn @ t_src)
    if abs(h[2, 2]) < 1e-12:
        raise DegenerateConfiguration("homography has vanishing h33")
    h = h / h[2, 2]
    if abs(np.linalg.det(h)) <= MIN_DET:
        raise DegenerateConfiguration("estimated homography is singular")
    return h


def _has_collinear_triple(pts: np.ndarray) -> bool:
    extent = float(np.ptp(pts, axis=0).max()) or 1.0
    for i, j, k in combinations(range(len(pts)), 3):
        d1 = pts[j] - pts[i]
        d2 = pts[k] - pts[i]
        if abs(d1[0] * d2[1] - d1[1] * d2[0]) < 1e-6 * extent * extent:
            return True
    return False


def reprojection_errors(h: np.ndarray, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    return np.sqrt(((project(h, src) - dst) ** 2).sum(axis=1))


def estimate_homography(src, dst, seed: int = 0, threshold: float = 3.0, confidence: float = 0.99,
                        max_iters: int = 2000, refine_rounds: int = 5) -> tuple[np.ndarray, np.ndarray]:
    """RANSAC over minimal 4-point samples, then a least-squares refit on the inliers.

    ``src[i]`` corresponds to ``dst[i]``; the returned homography maps
    ``src`` onto ``dst`` and the mask marks correspondences whose forward
    reprojection error is below ``threshold`` pixels.
    """
    src = np.asarray(src, dtype=np.float64).reshape(-1, 2)
    dst = np.asarray(dst, dtype=np.float64).reshape(-1, 2)
    n = len(src)
    if n < 4:
        raise TooFewMatches(f"need at least 4 matches, got {n}")
    rng = np.random.default_rng(seed)
    best_h, best_count = None, 0
    needed = max_iters
    it = 0
    while it < min(needed, max_iters):
        it += 1
        idx = rng.choice(n, size=4, replace=False)
        if _has_collinear_triple(src[idx]) or _has_collinear_triple(dst[idx]):
            continue
        try:
            h = dlt(src[idx], dst[idx])
        except DegenerateConfiguration:
            continue
        count = int((reprojection_errors(h, src, dst) < threshold).sum())
        if count > best_count:
            best_h, best_count = h, count
            w = count / n
            if w >= 1.0:
                needed = 0
            else:
                needed = math.ceil(math.log(1.0 - confidence) / math.log(1.0 - w ** 4))
    if best_h is None:
        raise DegenerateConfiguration(f"no valid model after {it} iterations")
    h = best_h
    mask = reprojection_errors(h, src, dst) < threshold
    for _ in range(refine_rounds):
        if mask.sum() < 4:
            break
        try:
            refit = dlt(src[mask], dst[mask])
        except DegenerateConfiguration:
            break
        new_mask = reprojection_errors(refit, src, dst) < threshold
        if new_mask.sum() < mask.sum():
            break
        h = refit
        if np.array_equal(new_mask, mask):
            break
        mask = new_mask
    return h, mask


def _checked(h) -> np.ndarray:
    h = np.asarray(h, dtype=np.float64)
    if h.shape != (3, 3) or not np.all(np.isfinite(h)) or abs(np.linalg.det(h)) <= MIN_DET:
        raise SingularHomography("homography is not invertible")
    return h


def warp_image(img, h, out_shape=None, origin=(0, 0)) -> np.ndarray:
    """Resample ``img`` into the frame that ``h`` maps it to.

    Each output pixel is pulled from ``h^-1 (x, y)`` by bilinear interpolation;
    pixels whose source lies outside the input are 0.  ``origin`` gives the
    frame coordinates of output pixel (0, 0), so a sub-rectangle of the
    target frame can be rendered on its own.
    """
    src = as_gray(img)
    h = _checked(h)
    out_h, out_w = src.shape if out_shape is None else out_shape
    hinv = np.linalg.inv(h)
    ys, xs = np.mgrid[0:out_h, 0:out_w].astype(np.float64)
    xs += origin[0]
    ys += origin[1]
    w = hinv[2, 0] * xs + hinv[2, 1] * ys + hinv[2, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        sx = (hinv[0, 0] * xs + hinv[0, 1] * ys + hinv[0, 2]) / w
        sy = (hinv[1, 0] * xs + hinv[1, 1] * ys + hinv[1, 2]) / w
    height, width = src.shape
    valid = (sx >= 0) & (sx <= width - 1) & (sy >= 0) & (sy <= height - 1)
    sx = np.where(valid, sx, 0.0)
    sy = np.where(valid, sy, 0.0)
    x0 = np.floor(sx).astype(np.intp)
    y0 = np.floor(sy).astype(np.intp)
    x1 = np.minimum(x0 + 1, width - 1)
    y1 = np.minimum(y0 + 1, height - 1)
    fx = sx - x0
    fy = sy - y0
    top = src[y0, x0] * (1.0 - fx) + src[y0, x1] * fx
    bottom = src[y1, x0] * (1.0 - fx) + src[y1, x1] * fx
    out = top * (1.0 - fy) + bottom * fy
    return np.where(valid, out, 0.0)


def rotation_from_homography(h) -> float:
    """Rotation angle (degrees, in (-180, 180]) of the closest rotation to the linear part."""
    h = _checked(h)
    a = h[:2, :2] / h[2, 2]
    u, _, vt = np.linalg.svd(a)
    r = u @ vt
    if np.linalg.det(r) < 0:
        u[:, -1] *= -1
        r = u @ vt
    angle = math.degrees(math.atan2(r[1, 0], r[0, 0]))
    return 180.0 if angle <= -180.0 else angle


def rotation_matrix(theta_deg: float, center=(0.0, 0.0), shift=(0.0, 0.0)) -> np.ndarray:
    """Homography rotating by ``theta_deg`` about ``center`` and then translating by ``shift``."""
    t = math.radians(theta_deg)
    c, s = math.cos(t), math.sin(t)
    cx, cy = center
    return np.array([
        [c, -s, cx - c * cx + s * cy + shift[0]],
        [s, c, cy - s * cx - c * cy + shift[1]],
        [0.0, 0.0, 1.0],
    ])
