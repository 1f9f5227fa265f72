"""Command-line entry point: one subcommand per pipeline stage.

Every successful run prints a single JSON summary line on stdout.  Exit
status is 0 on success, 1 on operational errors and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from .align import AlignConfig, align
from .classify import ClassifierConfig, ClassifierKind, load_model, save_model, train
from .errors import QCError
from .evaluation import loocv
from .features import Reference, read_feature_table, write_feature_table
from .filters import FilterId
from .imgcore import GrayMode, Roi, save_image
from .iqm import MetricId
from .monitor import RotationSample, detect_anomalies, fit_sinusoid, read_series, write_flags, write_series
from .pipeline import Corpus, Inspector, extract_dataset, load_gray
from .preselect import preselect
from .synth import CorpusConfig, generate_corpus


class UsageError(Exception):
    pass


def _emit(summary: dict) -> None:
    print(json.dumps(summary, sort_keys=True))


def _load_config(path) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise UsageError(f"{path}: config must be a JSON object")
    return doc


def _pick(flag, config: dict, key: str, default=None):
    """Flags win over the config file, which wins over the default."""
    if flag is not None:
        return flag
    return config.get(key, default)


def _align_cfg(config: dict) -> AlignConfig:
    return AlignConfig.from_mapping(config.get("align", {}))


def _window(args, config, corpus: Corpus | None = None) -> Roi:
    text = _pick(args.window, config, "window")
    if text is None:
        if corpus is None:
            raise UsageError("--window is required")
        return corpus.window
    if isinstance(text, (list, tuple)):
        return Roi(*[int(v) for v in text])
    return Roi.parse(text)


def _gray_mode(args) -> GrayMode:
    return GrayMode(args.gray)


def cmd_gen_corpus(args, config):
    values = dict(config.get("corpus", {}))
    values["master_seed"] = _pick(args.seed, config, "seed", 0)
    for key in ("n_acceptable", "n_unacceptable", "width", "height"):
        flag = getattr(args, key)
        if flag is not None:
            values[key] = flag
    cfg = CorpusConfig.from_mapping(values)
    entries = generate_corpus(cfg, args.out)
    bad = sum(e.label == "unacceptable" for e in entries)
    _emit({"command": "gen-corpus", "out": args.out, "images": len(entries),
           "acceptable": len(entries) - bad, "unacceptable": bad})


def cmd_align(args, config):
    seed = _pick(args.seed, config, "seed", 0)
    ref = load_gray(args.ref, _gray_mode(args))
    test = load_gray(args.test, _gray_mode(args))
    result = align(test, ref, _align_cfg(config), seed)
    if args.out:
        save_image(result.warped, args.out)
    _emit({"command": "align", **result.to_record()})


def _corpus_and_reference(args, config):
    corpus = Corpus.open(args.corpus) if args.corpus else None
    ref_path = args.ref or (corpus.reference_path if corpus else None)
    if ref_path is None:
        raise UsageError("--ref or --corpus is required")
    window = _window(args, config, corpus)
    reference = Reference(load_gray(ref_path, _gray_mode(args)), window, _align_cfg(config))
    return corpus, reference


def cmd_extract_features(args, config):
    if not args.corpus:
        raise UsageError("--corpus is required")
    corpus, reference = _corpus_and_reference(args, config)
    seed = _pick(args.seed, config, "seed", 0)
    jobs = _pick(args.jobs, config, "jobs", 1)
    samples, records = extract_dataset(corpus, reference, not args.no_align, seed, jobs, _gray_mode(args))
    write_feature_table(samples, args.out)
    if args.rotations:
        write_series([RotationSample(r["timestamp"], r["rotation_deg"]) for r in records
                      if r.get("succeeded")], args.rotations)
    failed = sum(1 for r in records if r.get("succeeded") is False)
    _emit({"command": "extract-features", "out": args.out, "samples": len(samples),
           "aligned": not args.no_align, "alignment_failures": failed})


def _kind(args, config) -> ClassifierKind:
    value = _pick(args.kind, config, "kind")
    if value is None:
        raise UsageError("--kind is required")
    return ClassifierKind(value)


def cmd_train(args, config):
    samples = read_feature_table(args.features)
    seed = _pick(args.seed, config, "seed", 0)
    kind = _kind(args, config)
    model = train(kind, samples, ClassifierConfig.from_mapping(config.get("classifier", {})), seed)
    save_model(model, args.out)
    _emit({"command": "train", "kind": kind.value, "samples": len(samples), "out": args.out})


def cmd_eval(args, config):
    samples = read_feature_table(args.features)
    seed = _pick(args.seed, config, "seed", 0)
    jobs = _pick(args.jobs, config, "jobs", 1)
    report = loocv(samples, _kind(args, config), ClassifierConfig.from_mapping(config.get("classifier", {})),
                   seed, jobs)
    if args.out:
        report.write(args.out)
    _emit({"command": "eval", **report.summary()})


def cmd_classify(args, config):
    model = load_model(args.model)
    _, reference = _corpus_and_reference(args, config)
    seed = _pick(args.seed, config, "seed", 0)
    inspector = Inspector(model, reference, not args.no_align, seed)
    for path in args.image:
        start = time.perf_counter()
        label, score, result = inspector.classify(load_gray(path, _gray_mode(args)))
        elapsed = time.perf_counter() - start
        summary = {"command": "classify", "image": path, "label": label, "score": score, "seconds": elapsed}
        if result is not None:
            summary.update(rotation_deg=result.rotation_deg, aligned=result.succeeded)
        _emit(summary)


def cmd_preselect(args, config):
    corpus, reference = _corpus_and_reference(args, config)
    paths = list(args.images)
    if not paths and corpus is not None:
        paths = [corpus.image_path(e) for e in sorted(corpus.entries, key=lambda e: e.id)]
    images = [(os.path.splitext(os.path.basename(p))[0], load_gray(p, _gray_mode(args))) for p in paths]
    metric = MetricId(_pick(args.metric, config, "metric", "mse"))
    fid = FilterId(_pick(args.filter, config, "filter", "no-filter"))
    seed = _pick(args.seed, config, "seed", 0)
    report = preselect(images, reference, metric=metric, hi=args.hi, lo=args.lo, seed=seed,
                       filter_id=fid, use_alignment=not args.no_align)
    if args.out:
        report.write_table(args.out)
    groups = report.groups()
    _emit({"command": "preselect", "images": len(report.ids), "mean_score": report.mean_score,
           **{k: len(v) for k, v in groups.items()}})


def cmd_monitor(args, config):
    series = read_series(args.series)
    grid = None
    if args.omega_min is not None or args.omega_max is not None:
        if args.omega_min is None or args.omega_max is None:
            raise UsageError("--omega-min and --omega-max go together")
        grid = np.geomspace(args.omega_min, args.omega_max, args.grid_size)
    fit = fit_sinusoid(series, grid)
    flags = detect_anomalies(series, fit, args.k)
    if args.out:
        write_flags(series, fit, args.k, args.out)
    _emit({"command": "monitor", "samples": len(series), "amplitude_deg": fit.amplitude, "omega": fit.omega,
           "period_s": 2 * math.pi / fit.omega, "phase": fit.phase, "offset_deg": fit.offset,
           "residual_sigma_deg": fit.residual_sigma, "flagged": len(flags)})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bottleqc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, images=True):
        p.add_argument("--config", help="JSON file with default settings")
        p.add_argument("--seed", type=int)
        if images:
            p.add_argument("--gray", choices=[m.value for m in GrayMode], default=GrayMode.WEIGHTED_SUM.value)

    def reference_args(p):
        p.add_argument("--corpus", help="corpus directory (manifest, reference, window)")
        p.add_argument("--ref", help="reference image")
        p.add_argument("--window", help="comparison window x,y,w,h")

    p = sub.add_parser("gen-corpus", help="render the synthetic corpus")
    common(p, images=False)
    p.add_argument("--out", required=True)
    p.add_argument("--n-acceptable", dest="n_acceptable", type=int)
    p.add_argument("--n-unacceptable", dest="n_unacceptable", type=int)
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("align", help="align one test image to the reference")
    common(p)
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--out", help="write the warped test image here")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("extract-features", help="build the feature table for a corpus")
    common(p)
    reference_args(p)
    p.add_argument("--no-align", action="store_true")
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--rotations", help="also write the rotation series (csv) here")
    p.set_defaults(func=cmd_extract_features)

    kinds = [k.value for k in ClassifierKind]
    p = sub.add_parser("train", help="train a classifier on a feature table")
    common(p, images=False)
    p.add_argument("--features", required=True)
    p.add_argument("--kind", choices=kinds)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="leave-one-out evaluation with ROC export")
    common(p, images=False)
    p.add_argument("--features", required=True)
    p.add_argument("--kind", choices=kinds)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", help="directory for summary.json, per_sample.csv, roc.csv")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("classify", help="classify images against a model and reference")
    common(p)
    reference_args(p)
    p.add_argument("--model", required=True)
    p.add_argument("--no-align", action="store_true")
    p.add_argument("image", nargs="+")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("preselect", help="unsupervised triage of unlabelled images")
    common(p)
    reference_args(p)
    p.add_argument("--metric", choices=[m.value for m in MetricId])
    p.add_argument("--filter", choices=[f.value for f in FilterId])
    p.add_argument("--hi", type=float, default=0.8)
    p.add_argument("--lo", type=float, default=0.2)
    p.add_argument("--no-align", action="store_true")
    p.add_argument("--out")
    p.add_argument("images", nargs="*")
    p.set_defaults(func=cmd_preselect)

    p = sub.add_parser("monitor", help="fit the rotation sinusoid and flag deviations")
    common(p, images=False)
    p.add_argument("--series", required=True)
    p.add_argument("--k", type=float, default=3.0)
    p.add_argument("--omega-min", dest="omega_min", type=float)
    p.add_argument("--omega-max", dest="omega_max", type=float)
    p.add_argument("--grid-size", dest="grid_size", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(func=cmd_monitor)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        config = _load_config(args.config)
        args.func(args, config)
    except UsageError as exc:
        print(f"bottleqc: {exc}", file=sys.stderr)
        return 2
    except (QCError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"bottleqc: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
