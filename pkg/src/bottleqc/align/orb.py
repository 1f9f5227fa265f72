"""Oriented FAST keypoints, steered BRIEF descriptors and Hamming matching."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from ..errors import EmptyDescriptorList, ImageTooSmall
from ..filters import correlate3, gaussian_blur, SOBEL_X, SOBEL_Y
from ..imgcore import as_gray
from .brief_pattern import BRIEF_PAIRS

MIN_ALIGN_SIZE = 32
FAST_ARC = 9
HARRIS_BLOCK = 7
ORIENT_RADIUS = 15
DESCRIPTOR_BORDER = 20
BRIEF_SIGMA = 2.0
SUPPRESS_RADIUS = 4.0
N_BITS = 256

# Bresenham circle of radius 3 as (dx, dy), clockwise from the top
CIRCLE = (
    (0, -3), (1, -3), (2, -2), (3, -1), (3, 0), (3, 1), (2, 2), (1, 3),
    (0, 3), (-1, 3), (-2, 2), (-3, 1), (-3, 0), (-3, -1), (-2, -2), (-1, -3),
)
PAIRS = np.array(BRIEF_PAIRS, dtype=np.float64)


@dataclass(frozen=True)
class Keypoint:
    """Corner location in full-resolution pixel coordinates."""

    x: float
    y: float
    response: float
    angle: float
    level: int = 0


@dataclass(frozen=True)
class Match:
    query: int
    train: int
    distance: int


class Pyramid:
    """Scale pyramid of a gray image with lazily smoothed levels."""

    def __init__(self, img, levels: int = 3, scale_factor: float = 1.2):
        base = as_gray(img)
        if min(base.shape) < MIN_ALIGN_SIZE:
            raise ImageTooSmall(f"alignment needs at least {MIN_ALIGN_SIZE}px per side, got {base.shape}")
        self.scale_factor = scale_factor
        self.images = [base]
        for level in range(1, levels):
            scale = scale_factor ** level
            shape = (int(base.shape[0] / scale), int(base.shape[1] / scale))
            if min(shape) < 2 * DESCRIPTOR_BORDER + 1:
                break
            self.images.append(_resize(base, shape, scale))
        self._smoothed: dict[int, np.ndarray] = {}

    def scale(self, level: int) -> float:
        return self.scale_factor ** level

    def smoothed(self, level: int) -> np.ndarray:
        if level not in self._smoothed:
            self._smoothed[level] = gaussian_blur(self.images[level], BRIEF_SIGMA)
        return self._smoothed[level]


def _lerp_axis(img: np.ndarray, n: int, scale: float, axis: int) -> np.ndarray:
    pos = np.arange(n, dtype=np.float64) * scale
    i0 = np.minimum(np.floor(pos).astype(np.intp), img.shape[axis] - 1)
    i1 = np.minimum(i0 + 1, img.shape[axis] - 1)
    frac = pos - i0
    shape = [1, 1]
    shape[axis] = n
    frac = frac.reshape(shape)
    return np.take(img, i0, axis=axis) * (1.0 - frac) + np.take(img, i1, axis=axis) * frac


def _resize(img: np.ndarray, shape, scale: float) -> np.ndarray:
    # bilinear sampling at (i * scale, j * scale), done one axis at a time
    return _lerp_axis(_lerp_axis(img, shape[0], scale, 0), shape[1], scale, 1)


def segment_test(values: np.ndarray, center: np.ndarray, threshold: float, arc: int = FAST_ARC) -> np.ndarray:
    """FAST segment test on gathered circle values.

    ``values`` has shape ``(k, 16)``; returns a boolean mask of the ``k``
    centres with ``arc`` contiguous circle pixels all brighter than
    ``center + threshold`` or all darker than ``center - threshold``.
    """
    center = center[:, None]
    out = np.zeros(values.shape[0], dtype=bool)
    for mask in (values > center + threshold, values < center - threshold):
        wrapped = np.concatenate([mask, mask[:, :arc - 1]], axis=1)
        run = np.zeros(values.shape[0], dtype=np.int16)
        best = np.zeros_like(run)
        for col in range(wrapped.shape[1]):
            run = np.where(wrapped[:, col], run + 1, 0)
            np.maximum(best, run, out=best)
        out |= best >= arc
    return out


def _fast_candidates(img: np.ndarray, threshold: float, margin: int):
    """Rows and cols (arrays) of pixels passing the full segment test."""
    height, width = img.shape
    ys = slice(margin, height - margin)
    xs = slice(margin, width - margin)
    center = img[ys, xs]

    def ring(k):
        dx, dy = CIRCLE[k]
        return img[margin + dy:height - margin + dy, margin + dx:width - margin + dx]

    # an arc of 9 out of 16 always covers at least two compass points
    bright = sum((ring(k) > center + threshold).astype(np.int8) for k in (0, 4, 8, 12))
    dark = sum((ring(k) < center - threshold).astype(np.int8) for k in (0, 4, 8, 12))
    rows, cols = np.nonzero((bright >= 2) | (dark >= 2))
    rows = rows + margin
    cols = cols + margin
    if rows.size == 0:
        return rows, cols
    values = np.stack([img[rows + dy, cols + dx] for dx, dy in CIRCLE], axis=1)
    keep = segment_test(values, img[rows, cols], threshold)
    return rows[keep], cols[keep]


def harris_response(img: np.ndarray, rows: np.ndarray, cols: np.ndarray, k: float) -> np.ndarray:
    """Harris score from Sobel gradients summed over a 7x7 block around each point."""
    half = HARRIS_BLOCK // 2
    offs = np.arange(-half - 1, half + 2)
    patches = img[(rows[:, None, None] + offs[None, :, None]), (cols[:, None, None] + offs[None, None, :])]
    gx = np.zeros((len(rows), HARRIS_BLOCK, HARRIS_BLOCK))
    gy = np.zeros_like(gx)
    for di in range(3):
        for dj in range(3):
            window = patches[:, di:di + HARRIS_BLOCK, dj:dj + HARRIS_BLOCK]
            gx += SOBEL_X[di, dj] * window
            gy += SOBEL_Y[di, dj] * window
    sxx = (gx * gx).sum(axis=(1, 2))
    syy = (gy * gy).sum(axis=(1, 2))
    sxy = (gx * gy).sum(axis=(1, 2))
    return sxx * syy - sxy * sxy - k * (sxx + syy) ** 2


_DISC_OFFS = np.arange(-ORIENT_RADIUS, ORIENT_RADIUS + 1)
_DISC = (_DISC_OFFS[:, None] ** 2 + _DISC_OFFS[None, :] ** 2) <= ORIENT_RADIUS ** 2


def intensity_centroid_angle(img: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    patches = img[rows[:, None, None] + _DISC_OFFS[None, :, None], cols[:, None, None] + _DISC_OFFS[None, None, :]]
    patches = patches * _DISC
    m10 = (patches * _DISC_OFFS[None, None, :]).sum(axis=(1, 2))
    m01 = (patches * _DISC_OFFS[None, :, None]).sum(axis=(1, 2))
    angle = np.arctan2(m01, m10)
    return np.where(angle <= -math.pi, math.pi, angle)


def detect_keypoints(img, max_kp: int = 500, fast_threshold: float = 0.08, levels: int = 3,
                     scale_factor: float = 1.2, harris_k: float = 0.04) -> list[Keypoint]:
    pyramid = img if isinstance(img, Pyramid) else Pyramid(img, levels, scale_factor)
    found = []
    for level, image in enumerate(pyramid.images):
        rows, cols = _fast_candidates(image, fast_threshold, DESCRIPTOR_BORDER)
        if rows.size == 0:
            continue
        resp = harris_response(image, rows, cols, harris_k)
        positive = resp > 0
        rows, cols, resp = rows[positive], cols[positive], resp[positive]
        if rows.size == 0:
            continue
        # 3x3 non-maximum suppression among the detected corners
        score = np.full(image.shape, -np.inf)
        score[rows, cols] = resp
        local_max = ndimage.maximum_filter(score, size=3, mode="constant", cval=-np.inf)
        keep = resp >= local_max[rows, cols]
        rows, cols, resp = rows[keep], cols[keep], resp[keep]
        angles = intensity_centroid_angle(image, rows, cols)
        scale = pyramid.scale(level)
        for r, c, s, a in zip(rows.tolist(), cols.tolist(), resp.tolist(), angles.tolist()):
            found.append(Keypoint(x=c * scale, y=r * scale, response=s, angle=a, level=level))
    found.sort(key=lambda kp: (-kp.response, kp.level, kp.y, kp.x))
    return suppress_duplicates(found, SUPPRESS_RADIUS)[:max_kp]


def suppress_duplicates(kps: list[Keypoint], radius: float) -> list[Keypoint]:
    """Greedy suppression across pyramid levels, strongest first.

    The same corner fires on every level; near-identical descriptors would
    then fail the ratio test against each other.
    """
    if not kps:
        return kps
    pts = np.array([(kp.x, kp.y) for kp in kps])
    tree = cKDTree(pts)
    taken = np.zeros(len(kps), dtype=bool)
    kept = []
    for i, kp in enumerate(kps):
        if taken[i]:
            continue
        kept.append(kp)
        taken[tree.query_ball_point(pts[i], radius)] = True
    return kept


def compute_descriptors(img, kps: list[Keypoint], levels: int = 3,
                        scale_factor: float = 1.2) -> tuple[list[Keypoint], np.ndarray]:
    """Steered BRIEF descriptors packed as ``(n, 32)`` uint8 rows.

    Keypoints within 20 px (at their pyramid level) of the border are
    dropped; the returned keypoint list is aligned with the descriptor rows.
    """
    pyramid = img if isinstance(img, Pyramid) else Pyramid(img, levels, scale_factor)
    by_level: dict[int, list[Keypoint]] = {}
    for kp in kps:
        by_level.setdefault(kp.level, []).append(kp)
    order = {id(kp): i for i, kp in enumerate(kps)}
    results = []
    for level, group in by_level.items():
        if level >= len(pyramid.images):
            continue
        image = pyramid.smoothed(level)
        height, width = image.shape
        scale = pyramid.scale(level)
        xs = np.rint(np.array([kp.x for kp in group]) / scale).astype(np.intp)
        ys = np.rint(np.array([kp.y for kp in group]) / scale).astype(np.intp)
        inside = ((xs >= DESCRIPTOR_BORDER) & (xs < width - DESCRIPTOR_BORDER)
                  & (ys >= DESCRIPTOR_BORDER) & (ys < height - DESCRIPTOR_BORDER))
        if not inside.any():
            continue
        group = [kp for kp, ok in zip(group, inside) if ok]
        xs, ys = xs[inside], ys[inside]
        angles = np.array([kp.angle for kp in group])
        cos, sin = np.cos(angles)[:, None], np.sin(angles)[:, None]
        # rotated offsets stay within 15*sqrt(2) < 22 px; pad so sampling never leaves the array
        pad = 22
        padded = np.pad(image, pad, mode="edge")

        def sample(px, py):
            rx = np.rint(cos * px - sin * py).astype(np.intp)
            ry = np.rint(sin * px + cos * py).astype(np.intp)
            return padded[ys[:, None] + ry + pad, xs[:, None] + rx + pad]

        bits = sample(PAIRS[:, 0], PAIRS[:, 1]) < sample(PAIRS[:, 2], PAIRS[:, 3])
        packed = np.packbits(bits, axis=1)
        for kp, row in zip(group, packed):
            results.append((order[id(kp)], kp, row))
    results.sort(key=lambda item: item[0])
    kept = [kp for _, kp, _ in results]
    desc = np.array([row for _, _, row in results], dtype=np.uint8).reshape(len(results), N_BITS // 8)
    return kept, desc


def hamming_matrix(query: np.ndarray, train: np.ndarray) -> np.ndarray:
    q = np.ascontiguousarray(query, dtype=np.uint8).view(np.uint64)
    t = np.ascontiguousarray(train, dtype=np.uint8).view(np.uint64)
    return np.bitwise_count(q[:, None, :] ^ t[None, :, :]).sum(axis=2, dtype=np.int64)


def match_descriptors(query: np.ndarray, train: np.ndarray, ratio: float = 0.75) -> list[Match]:
    """Mutual nearest neighbours that also pass the ratio test.

    Ties in distance resolve to the lowest index.
    """
    query = np.asarray(query)
    train = np.asarray(train)
    if len(query) == 0 or len(train) == 0:
        raise EmptyDescriptorList("both descriptor lists must be nonempty")
    dist = hamming_matrix(query, train)
    best_train = np.argmin(dist, axis=1)
    best_query = np.argmin(dist, axis=0)
    d1 = dist[np.arange(len(query)), best_train]
    if train.shape[0] > 1:
        d2 = np.partition(dist, 1, axis=1)[:, 1].astype(np.float64)
    else:
        d2 = np.full(len(query), np.inf)
    matches = []
    for qi in range(len(query)):
        ti = int(best_train[qi])
        if best_query[ti] != qi:
            continue
        if not d1[qi] < ratio * d2[qi]:
            continue
        matches.append(Match(query=qi, train=ti, distance=int(d1[qi])))
    return matches
