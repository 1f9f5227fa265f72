"""Rotation drift monitoring with a sinusoidal baseline.

Per-bottle rotation estimates drift periodically during production.  A
sinusoid ``a sin(wt) + b cos(wt) + c`` is fitted by grid search over
``w`` with linear least squares per grid point; samples far from the fitted
curve are flagged.
"""
from __future__ import annotations

import csv
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTimeSpan, TooFewSamples
from .features import format_timestamp, parse_timestamp

MIN_SAMPLES = 8
GRID_SIZE = 200
TRAILING_WINDOW = 500


@dataclass(frozen=True)
class RotationSample:
    timestamp: float
    angle: float


@dataclass(frozen=True)
class SinusoidFit:
    amplitude: float
    omega: float
    phase: float
    offset: float
    residual_sigma: float
    sin_coef: float
    cos_coef: float

    def predict(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        return self.sin_coef * np.sin(self.omega * t) + self.cos_coef * np.cos(self.omega * t) + self.offset

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega


def _arrays(series):
    t = np.array([s.timestamp for s in series], dtype=np.float64)
    a = np.array([s.angle for s in series], dtype=np.float64)
    return t, a


def default_omega_grid(timestamps, size: int = GRID_SIZE) -> np.ndarray:
    """Log-spaced angular frequencies from one cycle per span up to Nyquist."""
    t = np.sort(np.asarray(timestamps, dtype=np.float64))
    span = t[-1] - t[0]
    steps = np.diff(t)
    steps = steps[steps > 0]
    if span <= 0 or steps.size == 0:
        raise DegenerateTimeSpan("timestamps do not span a positive interval")
    lo = 2 * math.pi / span
    hi = math.pi / float(np.median(steps))
    if hi <= lo:
        return np.array([lo])
    return np.geomspace(lo, hi, size)


def fit_sinusoid(series, omega_grid=None) -> SinusoidFit:
    series = list(series)
    if len(series) < MIN_SAMPLES:
        raise TooFewSamples(f"need at least {MIN_SAMPLES} samples, got {len(series)}")
    t, theta = _arrays(series)
    grid = default_omega_grid(t) if omega_grid is None else np.asarray(omega_grid, dtype=np.float64)
    if np.ptp(t) <= 0:
        raise DegenerateTimeSpan("timestamps do not span a positive interval")
    # centring time improves conditioning; the phase is re-expressed afterwards
    t0 = float(t.mean())
    tc = t - t0
    best = None
    for w in grid:
        design = np.column_stack([np.sin(w * tc), np.cos(w * tc), np.ones_like(tc)])
        coef, *_ = np.linalg.lstsq(design, theta, rcond=None)
        rss = float(((design @ coef - theta) ** 2).sum())
        if best is None or rss < best[0]:
            best = (rss, float(w), coef)
    _, w, (p, q, c) = best
    # p sin(w(t - t0)) + q cos(w(t - t0)) == a sin(wt) + b cos(wt)
    cs, sn = math.cos(w * t0), math.sin(w * t0)
    a = p * cs + q * sn
    b = q * cs - p * sn
    resid = theta - (p * np.sin(w * tc) + q * np.cos(w * tc) + c)
    return SinusoidFit(
        amplitude=math.hypot(a, b),
        omega=w,
        phase=math.atan2(b, a),
        offset=float(c),
        residual_sigma=float(np.std(resid)),
        sin_coef=float(a),
        cos_coef=float(b),
    )


def residuals(series, fit: SinusoidFit) -> np.ndarray:
    t, theta = _arrays(series)
    return theta - fit.predict(t)


def detect_anomalies(series, fit: SinusoidFit, k: float = 3.0) -> list[float]:
    """Timestamps whose residual magnitude exceeds ``k`` residual sigmas."""
    series = list(series)
    r = np.abs(residuals(series, fit))
    limit = k * fit.residual_sigma
    return [s.timestamp for s, ri in zip(series, r) if ri > limit]


class SeriesMonitor:
    """Appends samples and refits on the trailing window only.

    A stencil change shows up as a new regime; refitting on recent samples
    adapts to it without explicit change-point modelling.
    """

    def __init__(self, window: int = TRAILING_WINDOW, k: float = 3.0, omega_grid=None):
        self.samples: deque = deque(maxlen=window)
        self.k = k
        self.omega_grid = omega_grid
        self.fit: SinusoidFit | None = None

    def append(self, sample: RotationSample) -> bool:
        """Add a sample; returns True when it is anomalous w.r.t. the current fit."""
        flagged = False
        if self.fit is not None and self.fit.residual_sigma > 0:
            r = abs(sample.angle - float(self.fit.predict(sample.timestamp)))
            flagged = r > self.k * self.fit.residual_sigma
        self.samples.append(sample)
        if len(self.samples) >= MIN_SAMPLES:
            self.fit = fit_sinusoid(self.samples, self.omega_grid)
        return flagged


def read_series(path) -> list[RotationSample]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows and not _is_number(rows[0][1]):
        rows = rows[1:]
    return [RotationSample(parse_timestamp(r[0]), float(r[1])) for r in rows]


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def write_series(series, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["timestamp", "rotation_deg"])
        for s in series:
            w.writerow([format_timestamp(s.timestamp), repr(s.angle)])


def write_flags(series, fit: SinusoidFit, k: float, path) -> None:
    series = list(series)
    r = residuals(series, fit)
    limit = k * fit.residual_sigma
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["timestamp", "residual", "threshold"])
        for s, ri in zip(series, r):
            if abs(ri) > limit:
                w.writerow([format_timestamp(s.timestamp), repr(float(ri)), repr(limit)])
