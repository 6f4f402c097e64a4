"""Independent brute-force oracles shared by the CRF tests and acceptance
suite. These deliberately avoid the library's own recursions: partition
functions and best paths are computed by full path enumeration."""

import itertools
import math
import random

import numpy as np

from duanzai.crf.model import CrfModel, score_path


def random_model_and_features(rng: random.Random, max_len=6, max_features=20,
                              weight_scale=1.0):
    """A random small CRF plus one random feature sequence for it."""
    n_features = rng.randint(1, max_features)
    names = [f"f{i}" for i in range(n_features)]
    model = CrfModel.zeros(names)
    npr = np.random.RandomState(rng.randrange(2**31))
    model.emissions = npr.normal(scale=weight_scale, size=(n_features, 3))
    model.transitions = npr.normal(scale=weight_scale, size=(3, 3))
    length = rng.randint(1, max_len)
    features = [
        rng.sample(names, rng.randint(1, min(4, n_features)))
        for _ in range(length)
    ]
    return model, features


def brute_force_log_partition(model: CrfModel, features) -> float:
    n = len(features)
    scores = [
        score_path(model, features, list(path))
        for path in itertools.product(range(3), repeat=n)
    ]
    m = max(scores)
    return m + math.log(sum(math.exp(s - m) for s in scores))


def brute_force_best_path(model: CrfModel, features):
    n = len(features)
    best_score, best_path = -math.inf, None
    for path in itertools.product(range(3), repeat=n):
        s = score_path(model, features, list(path))
        if s > best_score:
            best_score, best_path = s, list(path)
    return best_score, best_path


def finite_difference_gradient(model: CrfModel, batch, l2_lambda,
                               eps: float = 1e-5):
    """Central differences over every emission and transition weight."""
    from duanzai.crf.model import nll_and_gradient

    def loss_only():
        value, _, _ = nll_and_gradient(model, batch, l2_lambda)
        return value

    grad_e = np.zeros_like(model.emissions)
    for idx in np.ndindex(*model.emissions.shape):
        orig = model.emissions[idx]
        model.emissions[idx] = orig + eps
        f_plus = loss_only()
        model.emissions[idx] = orig - eps
        f_minus = loss_only()
        model.emissions[idx] = orig
        grad_e[idx] = (f_plus - f_minus) / (2 * eps)

    grad_t = np.zeros_like(model.transitions)
    for idx in np.ndindex(3, 3):
        orig = model.transitions[idx]
        model.transitions[idx] = orig + eps
        f_plus = loss_only()
        model.transitions[idx] = orig - eps
        f_minus = loss_only()
        model.transitions[idx] = orig
        grad_t[idx] = (f_plus - f_minus) / (2 * eps)
    return grad_e, grad_t


def max_relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    denom = np.maximum(1.0, np.maximum(np.abs(analytic), np.abs(numeric)))
    return float(np.max(np.abs(analytic - numeric) / denom))
