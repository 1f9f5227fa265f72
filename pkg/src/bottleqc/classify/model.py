"""Shared train / score / predict contract and model persistence."""
from __future__ import annotations

import enum
import hashlib
import json
import os
from dataclasses import asdict, dataclass, fields

import numpy as np

from ..errors import CorruptModel, IoError, SingleClassTrainingSet, TooFewSamples, VersionMismatch
from ..features import N_FEATURES, LabeledSample, Standardizer, fit_standardizer
from .knn import knn_score
from .mlp import fit_mlp, mlp_output, sigmoid
from .svm import fit_svm, svm_margin
from .tree import TreeBuilder, fit_forest, forest_votes, tree_predict

FORMAT_VERSION = 1


class ClassifierKind(enum.Enum):
    SVM = "svm"
    KNN = "knn"
    RANDOM_FOREST = "random-forest"
    DECISION_TREE = "decision-tree"
    NEURAL_NET = "neural-net"


KINDS = tuple(ClassifierKind)
NEEDS_BOTH_CLASSES = (ClassifierKind.SVM, ClassifierKind.NEURAL_NET)


@dataclass(frozen=True)
class ClassifierConfig:
    threshold: float = 0.5
    svm_c: float = 1.0
    svm_gamma: float | None = None
    svm_tol: float = 1e-3
    svm_max_iter: int = 10_000
    knn_k: int = 5
    tree_max_depth: int = 8
    tree_min_split: int = 2
    forest_trees: int = 100
    forest_max_features: int | None = None
    forest_bootstrap: bool = True
    nn_hidden: int = 16
    nn_lr: float = 0.05
    nn_epochs: int = 200
    nn_init: float = 0.1

    @classmethod
    def from_mapping(cls, values) -> "ClassifierConfig":
        unknown = set(values) - {f.name for f in fields(cls)}
        if unknown:
            raise ValueError(f"unknown classifier settings: {sorted(unknown)}")
        return cls(**values)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrainedModel:
    kind: ClassifierKind
    standardizer: Standardizer
    params: dict
    train_seed: int
    threshold: float = 0.5
    format_version: int = FORMAT_VERSION

    def score_many(self, x) -> np.ndarray:
        z = self.standardizer.transform(np.atleast_2d(np.asarray(x, dtype=np.float64)))
        p = self.params
        if self.kind is ClassifierKind.SVM:
            return sigmoid(svm_margin(p, z))
        if self.kind is ClassifierKind.KNN:
            return knn_score(np.asarray(p["train_x"]), np.asarray(p["train_positive"], dtype=np.float64), z, p["k"])
        if self.kind is ClassifierKind.DECISION_TREE:
            return tree_predict(p["tree"], z)
        if self.kind is ClassifierKind.RANDOM_FOREST:
            return forest_votes(p["trees"], z)
        return mlp_output(p, z)

    def score(self, fv) -> float:
        return float(self.score_many(fv)[0])

    def predict(self, fv, threshold: float | None = None) -> str:
        t = self.threshold if threshold is None else threshold
        return "unacceptable" if self.score(fv) >= t else "acceptable"

    # --- persistence ---

    def to_document(self) -> dict:
        payload = {
            "format_version": self.format_version,
            "kind": self.kind.value,
            "seed": self.train_seed,
            "threshold": self.threshold,
            "standardizer": self.standardizer.to_dict(),
            "params": _jsonable(self.params),
        }
        payload["checksum"] = _checksum(payload)
        return payload

    def dumps(self) -> str:
        return json.dumps(self.to_document(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_document(cls, doc: dict) -> "TrainedModel":
        if not isinstance(doc, dict) or "format_version" not in doc:
            raise CorruptModel("not a model document")
        if doc["format_version"] != FORMAT_VERSION:
            raise VersionMismatch(f"model format {doc['format_version']}, expected {FORMAT_VERSION}")
        body = {k: v for k, v in doc.items() if k != "checksum"}
        if doc.get("checksum") != _checksum(body):
            raise CorruptModel("checksum mismatch")
        try:
            kind = ClassifierKind(doc["kind"])
            params = _restore(kind, doc["params"])
            return cls(kind, Standardizer.from_dict(doc["standardizer"]), params, int(doc["seed"]),
                       float(doc["threshold"]), FORMAT_VERSION)
        except (KeyError, ValueError, TypeError) as exc:
            raise CorruptModel(f"malformed model document: {exc}") from exc


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _checksum(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _restore(kind: ClassifierKind, params: dict) -> dict:
    if kind is ClassifierKind.SVM:
        return {"gamma": float(params["gamma"]), "rho": float(params["rho"]),
                "support_vectors": np.array(params["support_vectors"], dtype=np.float64).reshape(-1, N_FEATURES),
                "dual_coef": np.array(params["dual_coef"], dtype=np.float64)}
    if kind is ClassifierKind.KNN:
        return {"k": int(params["k"]), "train_x": np.array(params["train_x"], dtype=np.float64),
                "train_positive": np.array(params["train_positive"], dtype=bool), "ids": list(params["ids"])}
    if kind is ClassifierKind.NEURAL_NET:
        return {"w1": np.array(params["w1"]), "b1": np.array(params["b1"]),
                "w2": np.array(params["w2"]), "b2": float(params["b2"])}
    return params


def train(kind: ClassifierKind, samples, config: ClassifierConfig = ClassifierConfig(), seed: int = 0) -> TrainedModel:
    """Fit a classifier; samples are ordered by id first, so input order never matters."""
    samples = sorted(samples, key=lambda s: s.id)
    if not samples:
        raise TooFewSamples("no training samples")
    x = np.array([s.features for s in samples])
    positive = np.array([s.positive for s in samples])
    if kind in NEEDS_BOTH_CLASSES and len(set(positive.tolist())) < 2:
        raise SingleClassTrainingSet(f"{kind.value} needs both classes in the training set")
    if len(samples) == 1:
        # a single row has no spread: every dimension passes through unscaled
        standardizer = Standardizer(x[0], np.zeros(x.shape[1]))
    else:
        standardizer = fit_standardizer(x)
    z = standardizer.transform(x)
    c = config
    if kind is ClassifierKind.SVM:
        params = fit_svm(z, positive, c.svm_c, c.svm_gamma, c.svm_tol, c.svm_max_iter)
    elif kind is ClassifierKind.KNN:
        params = {"k": c.knn_k, "train_x": z, "train_positive": positive, "ids": [s.id for s in samples]}
    elif kind is ClassifierKind.DECISION_TREE:
        params = {"tree": TreeBuilder(c.tree_max_depth, c.tree_min_split).build(z, positive)}
    elif kind is ClassifierKind.RANDOM_FOREST:
        params = {"trees": fit_forest(z, positive, seed, c.forest_trees, c.tree_max_depth, c.tree_min_split,
                                      c.forest_max_features, c.forest_bootstrap)}
    else:
        params = fit_mlp(z, positive, seed, c.nn_hidden, c.nn_lr, c.nn_epochs, c.nn_init)
    return TrainedModel(kind, standardizer, params, seed, c.threshold)


def score(model: TrainedModel, fv) -> float:
    return model.score(fv)


def predict(model: TrainedModel, fv) -> str:
    return model.predict(fv)


def save_model(model: TrainedModel, path) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(model.dumps())
    except OSError as exc:
        raise IoError(f"{path}: {exc}") from exc


def load_model(path) -> TrainedModel:
    if not os.path.exists(path):
        raise IoError(f"{path}: no such file")
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CorruptModel(f"{path}: {exc}") from exc
    except OSError as exc:
        raise IoError(f"{path}: {exc}") from exc
    return TrainedModel.from_document(doc)


def samples_from_arrays(x, positive, prefix: str = "s") -> list[LabeledSample]:
    """Convenience wrapper turning a design matrix into labelled samples."""
    width = max(4, len(str(len(x))))
    return [LabeledSample(f"{prefix}{i:0{width}d}", row, "unacceptable" if p else "acceptable")
            for i, (row, p) in enumerate(zip(np.asarray(x, dtype=np.float64), positive))]
