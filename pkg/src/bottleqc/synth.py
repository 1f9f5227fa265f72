"""Deterministic synthetic bottle-print corpus.

A scene is composed of three layers:

* a dark background with a vertical luminous gradient (lighting, static),
* the bottle: embossed mold marks plus the silk-screen print, both moving
  with the per-bottle pose jitter,
* 1-3 elliptical specular highlights (lighting, drawn per instance).

Defects act on the print layer only, before the pose is applied, so the
mold marks keep alignment anchored to the bottle.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache

import numpy as np

from .align.homography import rotation_matrix, warp_image
from .errors import IoError, MagnitudeOutOfRange
from .imgcore import Roi, as_gray, save_image

DEFECT_KINDS = ("rotation", "smear", "shift", "crop", "erasure")
# upper bounds on magnitude, in degrees / px / px / fraction / fraction
DEFECT_MAX = {"rotation": 45.0, "smear": 60.0, "shift": 60.0, "crop": 0.5, "erasure": 1.0}

PRINT_INK = 0.92
MARK_INK = 0.62
SUPERSAMPLE = 4
START_TIME = 1672531200.0  # 2023-01-01T00:00:00Z


@dataclass(frozen=True)
class DefectSpec:
    kind: str
    magnitude: float

    def to_dict(self) -> dict:
        return {"kind": self.kind, "magnitude": self.magnitude}


@dataclass(frozen=True)
class Pose:
    rotation_deg: float = 0.0
    dx: float = 0.0
    dy: float = 0.0


@dataclass(frozen=True)
class CorpusConfig:
    width: int = 256
    height: int = 256
    glyph_seed: int = 7
    master_seed: int = 0
    n_acceptable: int = 83
    n_unacceptable: int = 83
    reflections: tuple = (1, 3)
    reflection_intensity: tuple = (0.15, 0.4)
    jitter_rotation_deg: float = 1.5
    jitter_shift_px: float = 3.0
    # corpus rotations follow amplitude * sin(2 pi t / period) plus uniform noise
    rotation_sine_amplitude_deg: float = 1.0
    rotation_sine_period_s: float = 120.0
    rotation_noise_deg: float = 0.5
    time_step_s: float = 2.0
    # a print is unacceptable when any defect magnitude exceeds its threshold
    defect_thresholds: tuple = (("rotation", 2.0), ("smear", 4.0), ("shift", 5.0), ("crop", 0.05), ("erasure", 0.05))
    # magnitudes drawn for unacceptable prints
    # mostly 1.5x-3x the threshold; crop must reach past the window margin to be visible
    defect_ranges: tuple = (("rotation", 3.0, 6.0), ("smear", 6.0, 12.0), ("shift", 7.5, 15.0),
                            ("crop", 0.25, 0.45), ("erasure", 0.075, 0.15))

    def __post_init__(self):
        if self.width < 64 or self.height < 64:
            raise ValueError("corpus images must be at least 64x64")
        if self.n_acceptable < 0 or self.n_unacceptable < 0:
            raise ValueError("class counts must be non-negative")

    @property
    def thresholds(self) -> dict:
        return dict(self.defect_thresholds)

    @classmethod
    def from_mapping(cls, values) -> "CorpusConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(values) - names
        if unknown:
            raise ValueError(f"unknown corpus settings: {sorted(unknown)}")
        return cls(**{k: _freeze(v) for k, v in values.items()})

    def to_dict(self) -> dict:
        return asdict(self)


def _freeze(value):
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    return value


def is_unacceptable(defects, thresholds) -> bool:
    return any(d.magnitude > thresholds[d.kind] for d in defects)


# --- static layers -------------------------------------------------------

def print_bbox(cfg: CorpusConfig) -> Roi:
    x0, y0 = round(0.25 * cfg.width), round(0.32 * cfg.height)
    x1, y1 = round(0.75 * cfg.width), round(0.68 * cfg.height)
    return Roi(x0, y0, x1 - x0, y1 - y0)


def default_window(cfg: CorpusConfig) -> Roi:
    """Central 60% of the print bounding box."""
    box = print_bbox(cfg)
    w, h = round(0.6 * box.w), round(0.6 * box.h)
    return Roi(box.x + (box.w - w) // 2, box.y + (box.h - h) // 2, w, h)


def _coverage(shape, box: Roi, inside) -> np.ndarray:
    """Anti-aliased coverage of the predicate ``inside(x, y)`` over ``box``."""
    out = np.zeros(shape)
    offs = (np.arange(SUPERSAMPLE) + 0.5) / SUPERSAMPLE - 0.5
    ys = (box.y + np.arange(box.h))[:, None, None, None] + offs[None, None, :, None]
    xs = (box.x + np.arange(box.w))[None, :, None, None] + offs[None, None, None, :]
    ys, xs = np.broadcast_arrays(ys, xs)
    out[box.y:box.y + box.h, box.x:box.x + box.w] = inside(xs, ys).mean(axis=(2, 3))
    return out


def _glyph_shapes(cfg: CorpusConfig):
    """Stroke primitives for the print, fixed by ``glyph_seed``."""
    rng = np.random.default_rng([cfg.glyph_seed, 0x9117])
    box = print_bbox(cfg)
    cols, rows = 6, 3
    cw, ch = box.w / cols, box.h / rows
    stroke = 0.18 * min(cw, ch)
    shapes = []
    for r in range(rows):
        for c in range(cols):
            cx0, cy0 = box.x + c * cw, box.y + r * ch
            # glyph body occupies the inner 70% of the cell
            gx0, gy0 = cx0 + 0.15 * cw, cy0 + 0.15 * ch
            gw, gh = 0.7 * cw, 0.7 * ch
            for kind in rng.choice(["hbar", "vbar", "diag", "arc", "block"], size=rng.integers(2, 4), replace=False):
                if kind == "hbar":
                    y = gy0 + rng.uniform(0.1, 0.9) * gh
                    shapes.append(("rect", gx0, y - stroke / 2, gx0 + gw, y + stroke / 2))
                elif kind == "vbar":
                    x = gx0 + rng.uniform(0.1, 0.9) * gw
                    shapes.append(("rect", x - stroke / 2, gy0, x + stroke / 2, gy0 + gh))
                elif kind == "diag":
                    flip = rng.integers(0, 2)
                    a = (gx0, gy0 + gh) if flip else (gx0, gy0)
                    b = (gx0 + gw, gy0) if flip else (gx0 + gw, gy0 + gh)
                    shapes.append(("line", *a, *b, stroke / 2))
                elif kind == "arc":
                    radius = 0.35 * min(gw, gh)
                    start = rng.uniform(-math.pi, math.pi)
                    shapes.append(("arc", gx0 + gw / 2, gy0 + gh / 2, radius, stroke / 2, start, start + rng.uniform(2.0, 4.5)))
                else:
                    s = rng.uniform(0.25, 0.4) * min(gw, gh)
                    x = gx0 + rng.uniform(0, gw - s)
                    y = gy0 + rng.uniform(0, gh - s)
                    shapes.append(("rect", x, y, x + s, y + s))
    return shapes


def _inside_shapes(shapes):
    def inside(xs, ys):
        hit = np.zeros(xs.shape, dtype=bool)
        for shape in shapes:
            if shape[0] == "rect":
                _, x0, y0, x1, y1 = shape
                hit |= (xs >= x0) & (xs < x1) & (ys >= y0) & (ys < y1)
            elif shape[0] == "line":
                _, ax, ay, bx, by, half = shape
                dx, dy = bx - ax, by - ay
                t = np.clip(((xs - ax) * dx + (ys - ay) * dy) / (dx * dx + dy * dy), 0.0, 1.0)
                hit |= (xs - ax - t * dx) ** 2 + (ys - ay - t * dy) ** 2 <= half * half
            else:
                _, cx, cy, radius, half, a0, a1 = shape
                rr = np.hypot(xs - cx, ys - cy)
                ang = (np.arctan2(ys - cy, xs - cx) - a0) % (2 * math.pi)
                hit |= (np.abs(rr - radius) <= half) & (ang <= a1 - a0)
        return hit
    return inside


@lru_cache(maxsize=8)
def _print_layer(cfg: CorpusConfig) -> np.ndarray:
    layer = _coverage((cfg.height, cfg.width), print_bbox(cfg), _inside_shapes(_glyph_shapes(cfg)))
    layer.setflags(write=False)
    return layer


def mark_boxes(cfg: CorpusConfig) -> list[tuple]:
    """Embossed mold code: irregular blocks in bands above and below the print.

    Positions and sizes come from ``glyph_seed`` so the pattern is not a
    lattice; repeated structure would make keypoint matching ambiguous.
    """
    rng = np.random.default_rng([cfg.glyph_seed, 0x3A5C])
    unit = max(3.0, 0.022 * cfg.width)
    boxes = []
    bands = ((0.08, 0.16), (0.17, 0.26), (0.74, 0.83), (0.84, 0.92))
    for y0, y1 in ((a * cfg.height, b * cfg.height) for a, b in bands):
        x = 0.12 * cfg.width + rng.uniform(0.0, 2.0) * unit
        while x < 0.86 * cfg.width:
            w = unit * rng.uniform(0.8, 2.6)
            h = unit * rng.uniform(0.8, 2.6)
            y = rng.uniform(y0, y1 - h)
            boxes.append(("rect", x, y, x + w, y + h))
            if rng.uniform() < 0.5:
                # an L-shaped or T-shaped appendix
                ax = x + rng.uniform(0.0, 0.6) * w
                ah = unit * rng.uniform(0.8, 2.0)
                ay = y + h if rng.uniform() < 0.5 else y - ah
                boxes.append(("rect", ax, ay, ax + unit * 0.9, ay + ah))
            x += w + unit * rng.uniform(0.9, 2.2)
    return boxes


@lru_cache(maxsize=8)
def _mark_layer(cfg: CorpusConfig) -> np.ndarray:
    whole = Roi(0, 0, cfg.width, cfg.height)
    layer = _coverage((cfg.height, cfg.width), whole, _inside_shapes(mark_boxes(cfg)))
    layer.setflags(write=False)
    return layer


def _background(cfg: CorpusConfig) -> np.ndarray:
    y = np.linspace(0.0, 1.0, cfg.height)[:, None]
    x = np.linspace(-1.0, 1.0, cfg.width)[None, :]
    return 0.05 + 0.12 * y + 0.06 * np.exp(-(x / 0.6) ** 2)


def _reflections(cfg: CorpusConfig, rng: np.random.Generator) -> np.ndarray:
    lo, hi = cfg.reflections
    count = int(rng.integers(lo, hi + 1))
    y, x = np.mgrid[0:cfg.height, 0:cfg.width].astype(np.float64)
    glare = np.zeros((cfg.height, cfg.width))
    for _ in range(count):
        cx = rng.uniform(0.1, 0.9) * cfg.width
        cy = rng.uniform(0.1, 0.9) * cfg.height
        ax = rng.uniform(0.06, 0.14) * cfg.width
        ay = rng.uniform(0.20, 0.40) * cfg.height
        peak = rng.uniform(*cfg.reflection_intensity)
        blob = peak * np.exp(-0.5 * (((x - cx) / ax) ** 2 + ((y - cy) / ay) ** 2))
        glare = glare + (1.0 - glare) * blob
    return glare


# --- defects -------------------------------------------------------------

def _check_defect(spec: DefectSpec) -> None:
    if spec.kind not in DEFECT_MAX:
        raise ValueError(f"unknown defect kind {spec.kind!r}")
    if not 0.0 <= spec.magnitude <= DEFECT_MAX[spec.kind]:
        raise MagnitudeOutOfRange(f"{spec.kind} magnitude {spec.magnitude} outside [0, {DEFECT_MAX[spec.kind]}]")


def _motion_blur(img: np.ndarray, length: float, angle: float) -> np.ndarray:
    steps = int(math.ceil(length)) + 1
    acc = np.zeros_like(img)
    for t in np.linspace(-length / 2, length / 2, steps):
        acc += warp_image(img, rotation_matrix(0.0, shift=(t * math.cos(angle), t * math.sin(angle))))
    return acc / steps


def apply_defect(img, spec: DefectSpec, seed: int = 0, region: Roi | None = None) -> np.ndarray:
    """Damage ``img`` inside ``region`` (default: whole image).

    rotation and shift move the content about the region centre, smear
    motion-blurs a random sub-box, crop blanks a strip along one edge and
    erasure blanks random grid cells covering the requested area fraction.
    Blanked or uncovered pixels become 0.
    """
    _check_defect(spec)
    arr = as_gray(img)
    if spec.magnitude == 0.0:
        return arr.copy()
    if region is None:
        region = Roi(0, 0, arr.shape[1], arr.shape[0])
    region.check(arr.shape)
    rng = np.random.default_rng(seed)
    center = (region.x + (region.w - 1) / 2, region.y + (region.h - 1) / 2)
    m = spec.magnitude
    if spec.kind == "rotation":
        return warp_image(arr, rotation_matrix(m, center=center))
    if spec.kind == "shift":
        angle = rng.uniform(-math.pi, math.pi)
        return warp_image(arr, rotation_matrix(0.0, shift=(m * math.cos(angle), m * math.sin(angle))))
    out = arr.copy()
    if spec.kind == "smear":
        angle = rng.uniform(-math.pi, math.pi)
        w, h = max(1, region.w // 2), max(1, region.h // 2)
        # keep the smeared box centre inside the middle of the region
        x = region.x + int(rng.integers(region.w // 8, region.w - w - region.w // 8 + 1))
        y = region.y + int(rng.integers(region.h // 8, region.h - h - region.h // 8 + 1))
        blurred = _motion_blur(arr, m, angle)
        out[y:y + h, x:x + w] = blurred[y:y + h, x:x + w]
        return out
    if spec.kind == "crop":
        edge = int(rng.integers(0, 4))
        if edge in (0, 1):
            cut = max(1, round(m * region.w))
            xs = slice(region.x, region.x + cut) if edge == 0 else slice(region.x + region.w - cut, region.x + region.w)
            out[region.y:region.y + region.h, xs] = 0.0
        else:
            cut = max(1, round(m * region.h))
            ys = slice(region.y, region.y + cut) if edge == 2 else slice(region.y + region.h - cut, region.y + region.h)
            out[ys, region.x:region.x + region.w] = 0.0
        return out
    # erasure
    cell = max(2, round(min(region.w, region.h) / 8))
    nx, ny = -(-region.w // cell), -(-region.h // cell)
    order = rng.permutation(nx * ny)
    for idx in order[:round(m * nx * ny)]:
        cy, cx = divmod(int(idx), nx)
        x0, y0 = region.x + cx * cell, region.y + cy * cell
        out[y0:min(y0 + cell, region.y + region.h), x0:min(x0 + cell, region.x + region.w)] = 0.0
    return out


# --- rendering -----------------------------------------------------------

@dataclass
class RenderedInstance:
    image: np.ndarray
    pose: Pose
    defects: tuple = field(default_factory=tuple)


def _pose_matrix(cfg: CorpusConfig, pose: Pose) -> np.ndarray:
    center = ((cfg.width - 1) / 2, (cfg.height - 1) / 2)
    return rotation_matrix(pose.rotation_deg, center=center, shift=(pose.dx, pose.dy))


def render_instance(cfg: CorpusConfig, instance_seed, pose: Pose | None = None, defects=()) -> RenderedInstance:
    """Render one bottle.  ``pose=None`` draws a uniform jitter from the seed."""
    rng = np.random.default_rng(instance_seed)
    drawn = Pose(
        rotation_deg=float(rng.uniform(-cfg.jitter_rotation_deg, cfg.jitter_rotation_deg)),
        dx=float(rng.uniform(-cfg.jitter_shift_px, cfg.jitter_shift_px)),
        dy=float(rng.uniform(-cfg.jitter_shift_px, cfg.jitter_shift_px)),
    )
    pose = drawn if pose is None else pose
    glare = _reflections(cfg, rng)
    defect_seeds = rng.integers(0, 2**32, size=max(1, len(defects)))

    ink = np.array(_print_layer(cfg))
    for spec, dseed in zip(defects, defect_seeds):
        ink = apply_defect(ink, spec, int(dseed), region=print_bbox(cfg))
    marks = _mark_layer(cfg)
    if pose != Pose():
        h = _pose_matrix(cfg, pose)
        ink = warp_image(ink, h)
        marks = warp_image(marks, h)
    img = _background(cfg)
    img = img * (1.0 - marks) + MARK_INK * marks
    img = img * (1.0 - ink) + PRINT_INK * ink
    img = img + (1.0 - img) * glare
    return RenderedInstance(img, pose, tuple(defects))


def render_clean(cfg: CorpusConfig, instance_seed, pose: Pose | None = None) -> np.ndarray:
    return render_instance(cfg, instance_seed, pose).image


def render_reference(cfg: CorpusConfig) -> np.ndarray:
    """The acceptable reference bottle: nominal pose, reflections from a fixed stream."""
    return render_clean(cfg, [cfg.master_seed, 0x5EF], Pose())


# --- corpus --------------------------------------------------------------

@dataclass(frozen=True)
class ManifestEntry:
    id: str
    path: str
    label: str
    defects: tuple
    jitter_rotation_deg: float
    jitter_shift: tuple
    timestamp: float

    def to_json(self) -> str:
        record = {
            "id": self.id,
            "path": self.path,
            "label": self.label,
            "defects": [d.to_dict() for d in self.defects],
            "jitter_rotation_deg": self.jitter_rotation_deg,
            "jitter_shift": list(self.jitter_shift),
            "timestamp": self.timestamp,
        }
        return json.dumps(record, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "ManifestEntry":
        r = json.loads(line)
        return cls(
            id=r["id"], path=r["path"], label=r["label"],
            defects=tuple(DefectSpec(d["kind"], float(d["magnitude"])) for d in r["defects"]),
            jitter_rotation_deg=float(r["jitter_rotation_deg"]),
            jitter_shift=tuple(r["jitter_shift"]),
            timestamp=float(r["timestamp"]),
        )


def plan_corpus(cfg: CorpusConfig) -> list[tuple[str, Pose, tuple, float, list]]:
    """Per-image (id, pose, defects, timestamp, instance seed), without rendering."""
    total = cfg.n_acceptable + cfg.n_unacceptable
    rng = np.random.default_rng([cfg.master_seed, 0xC0])
    bad = np.zeros(total, dtype=bool)
    bad[rng.permutation(total)[:cfg.n_unacceptable]] = True
    ranges = {k: (lo, hi) for k, lo, hi in cfg.defect_ranges}
    plan = []
    for i in range(total):
        inst_rng = np.random.default_rng([cfg.master_seed, 0x1D, i])
        t = START_TIME + i * cfg.time_step_s
        rotation = (cfg.rotation_sine_amplitude_deg * math.sin(2 * math.pi * (t - START_TIME) / cfg.rotation_sine_period_s)
                    + inst_rng.uniform(-cfg.rotation_noise_deg, cfg.rotation_noise_deg))
        pose = Pose(float(rotation),
                    float(inst_rng.uniform(-cfg.jitter_shift_px, cfg.jitter_shift_px)),
                    float(inst_rng.uniform(-cfg.jitter_shift_px, cfg.jitter_shift_px)))
        defects = ()
        if bad[i]:
            kind = DEFECT_KINDS[int(inst_rng.integers(0, len(DEFECT_KINDS)))]
            lo, hi = ranges[kind]
            defects = (DefectSpec(kind, round(float(inst_rng.uniform(lo, hi)), 4)),)
        plan.append((f"bottle-{i:04d}", pose, defects, t, [cfg.master_seed, 0xB0, i]))
    return plan


def generate_corpus(cfg: CorpusConfig, out_dir) -> list[ManifestEntry]:
    """Render the corpus into ``out_dir``.

    Layout: ``reference.png``, ``images/<id>.png``, ``manifest.jsonl`` (one
    record per line, id order) and ``corpus.json`` (config, window and
    label thresholds).
    """
    out_dir = os.fspath(out_dir)
    try:
        os.makedirs(os.path.join(out_dir, "images"), exist_ok=True)
    except OSError as exc:
        raise IoError(f"{out_dir}: {exc}") from exc
    save_image(render_reference(cfg), os.path.join(out_dir, "reference.png"))
    thresholds = cfg.thresholds
    entries = []
    for sample_id, pose, defects, t, seed in plan_corpus(cfg):
        rendered = render_instance(cfg, seed, pose, defects)
        rel = f"images/{sample_id}.png"
        save_image(rendered.image, os.path.join(out_dir, rel))
        label = "unacceptable" if is_unacceptable(defects, thresholds) else "acceptable"
        entries.append(ManifestEntry(sample_id, rel, label, defects, pose.rotation_deg, (pose.dx, pose.dy), t))
    try:
        with open(os.path.join(out_dir, "manifest.jsonl"), "w", encoding="utf-8") as fh:
            for entry in entries:
                fh.write(entry.to_json() + "\n")
        meta = {
            "config": cfg.to_dict(),
            "reference": "reference.png",
            "window": [default_window(cfg).x, default_window(cfg).y, default_window(cfg).w, default_window(cfg).h],
            "manifest": "manifest.jsonl",
        }
        with open(os.path.join(out_dir, "corpus.json"), "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"{out_dir}: {exc}") from exc
    return entries


def load_manifest(path) -> list[ManifestEntry]:
    with open(path, encoding="utf-8") as fh:
        return [ManifestEntry.from_json(line) for line in fh if line.strip()]
