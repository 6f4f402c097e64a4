"""Linear-chain CRF: scoring, forward-backward, Viterbi, span extraction."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO

import numpy as np

from ..pinyin import PinyinLexicon
from .features import TEMPLATE_VERSION, featurize

LABELS = ("B", "I", "O")  # fixed order; index 0 wins ties
B, I, O = 0, 1, 2

MODEL_FORMAT = "duanzai-crf"
MODEL_FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    """Unreadable model file or incompatible template_version."""


def _logsumexp(a: np.ndarray, axis: int | None = None) -> np.ndarray:
    m = np.max(a, axis=axis, keepdims=True)
    out = m + np.log(np.sum(np.exp(a - m), axis=axis, keepdims=True))
    return np.squeeze(out, axis=axis) if axis is not None else out.reshape(())


@dataclass
class CrfModel:
    """Feature-indexed emission weights plus a 3x3 transition matrix."""

    feature_index: dict[str, int]
    emissions: np.ndarray          # [n_features, 3]
    transitions: np.ndarray        # [3, 3], transitions[prev, next]
    template_version: str = TEMPLATE_VERSION
    trained_on: dict = field(default_factory=dict)

    @classmethod
    def zeros(cls, features: list[str]) -> "CrfModel":
        index = {f: i for i, f in enumerate(features)}
        return cls(index, np.zeros((len(features), 3)), np.zeros((3, 3)))

    def feature_ids(self, feats: list[str]) -> np.ndarray:
        """Known-feature ids for one position; unseen features score 0."""
        ids = [self.feature_index[f] for f in feats if f in self.feature_index]
        return np.asarray(ids, dtype=np.intp)

    def emission_scores(self, features: list[list[str]]) -> np.ndarray:
        n = len(features)
        scores = np.zeros((n, 3))
        for i, feats in enumerate(features):
            ids = self.feature_ids(feats)
            if len(ids):
                scores[i] = self.emissions[ids].sum(axis=0)
        return scores


def score_path(model: CrfModel, features: list[list[str]], labels: list[int]) -> float:
    e = model.emission_scores(features)
    total = sum(e[i, y] for i, y in enumerate(labels))
    total += sum(model.transitions[labels[i - 1], labels[i]]
                 for i in range(1, len(labels)))
    return float(total)


def forward_log_partition(model: CrfModel, features: list[list[str]]) -> float:
    """log sum over all label paths of exp(path score), log-space forward."""
    e = model.emission_scores(features)
    alpha = e[0].copy()
    for i in range(1, len(e)):
        alpha = _logsumexp(alpha[:, None] + model.transitions, axis=0) + e[i]
    return float(_logsumexp(alpha))


def _forward_backward(e: np.ndarray, t: np.ndarray):
    """Returns (logZ, node marginals [n,3], edge marginals [n-1,3,3])."""
    n = len(e)
    alpha = np.zeros((n, 3))
    alpha[0] = e[0]
    for i in range(1, n):
        alpha[i] = _logsumexp(alpha[i - 1][:, None] + t, axis=0) + e[i]
    logz = float(_logsumexp(alpha[n - 1]))

    beta = np.zeros((n, 3))
    for i in range(n - 2, -1, -1):
        beta[i] = _logsumexp(t + (e[i + 1] + beta[i + 1])[None, :], axis=1)

    node = np.exp(alpha + beta - logz)
    edge = np.zeros((max(n - 1, 0), 3, 3))
    for i in range(1, n):
        edge[i - 1] = np.exp(
            alpha[i - 1][:, None] + t + (e[i] + beta[i])[None, :] - logz)
    return logz, node, edge


def nll_and_gradient(model: CrfModel,
                     batch: list[tuple[list[list[str]], list[int]]],
                     l2_lambda: float):
    """L2-regularized negative log-likelihood and its exact gradient.

    Gradient = expected feature counts (forward-backward marginals) minus
    empirical counts, plus lambda * w. Returns (loss, d_emissions,
    d_transitions) with the same shapes as the weights.
    """
    grad_e = np.zeros_like(model.emissions)
    grad_t = np.zeros_like(model.transitions)
    loss = 0.0
    for features, gold in batch:
        e = model.emission_scores(features)
        logz, node, edge = _forward_backward(e, model.transitions)
        loss += logz - score_path(model, features, gold)
        for i, feats in enumerate(features):
            ids = model.feature_ids(feats)
            if len(ids):
                np.add.at(grad_e, ids, node[i])
                grad_e[ids, gold[i]] -= 1.0
        if len(features) > 1:
            grad_t += edge.sum(axis=0)
            for i in range(1, len(gold)):
                grad_t[gold[i - 1], gold[i]] -= 1.0
    loss += 0.5 * l2_lambda * (
        float(np.sum(model.emissions ** 2)) + float(np.sum(model.transitions ** 2)))
    grad_e += l2_lambda * model.emissions
    grad_t += l2_lambda * model.transitions
    return loss, grad_e, grad_t


def viterbi_decode(model: CrfModel, features: list[list[str]]) -> list[str]:
    """Argmax label path; ties broken toward the lowest label index."""
    e = model.emission_scores(features)
    n = len(e)
    vit = np.zeros((n, 3))
    back = np.zeros((n, 3), dtype=np.intp)
    vit[0] = e[0]
    for i in range(1, n):
        scores = vit[i - 1][:, None] + model.transitions + e[i][None, :]
        back[i] = np.argmax(scores, axis=0)  # first max = lowest prev index
        vit[i] = scores[back[i], np.arange(3)]
    path = [int(np.argmax(vit[n - 1]))]
    for i in range(n - 1, 0, -1):
        path.append(int(back[i, path[-1]]))
    path.reverse()
    return [LABELS[y] for y in path]


def tags_from_span(length: int, span: tuple[int, int]) -> list[str]:
    start, end = span
    tags = ["O"] * length
    tags[start] = "B"
    for i in range(start + 1, end):
        tags[i] = "I"
    return tags


def extract_spans(tags: list[str]) -> list[tuple[int, int]]:
    """Maximal spans of non-O tags.

    An orphan I (no preceding B/I) opens a new span; a span only closes at
    O, so degenerate all-B taggings collapse to one full-sentence span.
    """
    spans = []
    start = None
    for i, tag in enumerate(tags):
        if tag == "O":
            if start is not None:
                spans.append((start, i))
                start = None
        elif start is None:
            start = i
    if start is not None:
        spans.append((start, len(tags)))
    return spans


def predict_spans(model: CrfModel, text: str,
                  lexicon: PinyinLexicon) -> list[tuple[int, int]]:
    if not text:
        return []
    tags = viterbi_decode(model, featurize(text, lexicon))
    return extract_spans(tags)


def save_model(model: CrfModel, stream: IO[str]) -> None:
    features = [""] * len(model.feature_index)
    for feat, idx in model.feature_index.items():
        features[idx] = feat
    obj = {
        "format": MODEL_FORMAT,
        "format_version": MODEL_FORMAT_VERSION,
        "template_version": model.template_version,
        "labels": list(LABELS),
        "features": features,
        "emission_weights": model.emissions.tolist(),
        "transition_weights": model.transitions.tolist(),
        "trained_on": model.trained_on,
    }
    json.dump(obj, stream, ensure_ascii=False)


def load_model(stream: IO[str]) -> CrfModel:
    obj = json.load(stream)
    if obj.get("format") != MODEL_FORMAT:
        raise ModelFormatError("not a crf model file")
    if obj.get("template_version") != TEMPLATE_VERSION:
        raise ModelFormatError(
            f"model was built with templates {obj.get('template_version')!r}, "
            f"this build uses {TEMPLATE_VERSION!r}")
    if obj.get("labels") != list(LABELS):
        raise ModelFormatError("label set mismatch")
    features = obj["features"]
    return CrfModel(
        feature_index={f: i for i, f in enumerate(features)},
        emissions=np.asarray(obj["emission_weights"], dtype=float),
        transitions=np.asarray(obj["transition_weights"], dtype=float),
        template_version=obj["template_version"],
        trained_on=obj.get("trained_on", {}),
    )
