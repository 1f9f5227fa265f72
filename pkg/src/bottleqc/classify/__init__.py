"""The five supervised classifiers behind one train/score/predict contract."""
from .model import (
    FORMAT_VERSION,
    KINDS,
    ClassifierConfig,
    ClassifierKind,
    TrainedModel,
    load_model,
    predict,
    samples_from_arrays,
    save_model,
    score,
    train,
)

__all__ = [
    "FORMAT_VERSION", "KINDS", "ClassifierConfig", "ClassifierKind", "TrainedModel", "load_model",
    "predict", "samples_from_arrays", "save_model", "score", "train",
]
