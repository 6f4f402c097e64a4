"""Punchline tagging with a feature-template linear-chain CRF."""

from .features import TEMPLATE_VERSION, featurize
from .model import (
    LABELS,
    CrfModel,
    ModelFormatError,
    extract_spans,
    forward_log_partition,
    load_model,
    nll_and_gradient,
    predict_spans,
    save_model,
    score_path,
    tags_from_span,
    viterbi_decode,
)
from .training import TrainConfig, TrainingError, train

__all__ = [
    "TEMPLATE_VERSION", "featurize",
    "LABELS", "CrfModel", "ModelFormatError", "extract_spans",
    "forward_log_partition", "load_model", "nll_and_gradient",
    "predict_spans", "save_model", "score_path", "tags_from_span",
    "viterbi_decode",
    "TrainConfig", "TrainingError", "train",
]
