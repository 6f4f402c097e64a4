"""Maximum-likelihood CRF training: L-BFGS with a monotone Armijo line search."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..corpus import Corpus
from ..pinyin import PinyinLexicon
from .features import TEMPLATE_VERSION, featurize
from .model import LABELS, CrfModel, nll_and_gradient, tags_from_span

logger = logging.getLogger(__name__)

LABEL_INDEX = {lab: i for i, lab in enumerate(LABELS)}


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    l2_lambda: float = 0.1
    max_iterations: int = 100
    convergence_tol: float = 1e-5
    seed: int = 0

    def __post_init__(self):
        if self.l2_lambda < 0:
            raise ValueError("l2_lambda must be non-negative")
        if self.max_iterations <= 0 or self.convergence_tol <= 0:
            raise ValueError("max_iterations and convergence_tol must be positive")


def _lbfgs(fun, x0: np.ndarray, max_iterations: int, tol: float,
           memory: int = 10, c1: float = 1e-4):
    """Two-loop-recursion L-BFGS with backtracking Armijo line search.

    Only steps satisfying f_new <= f + c1*step*g.d (with g.d < 0) are
    accepted, so the returned loss history is non-increasing by construction.
    """
    x = x0.copy()
    f, g = fun(x)
    if not np.isfinite(f):
        raise TrainingError("non-finite loss at the starting point")
    history = [f]
    s_list: list[np.ndarray] = []
    y_list: list[np.ndarray] = []
    rho: list[float] = []

    for _ in range(max_iterations):
        q = g.copy()
        alphas = []
        for s, y, r in zip(reversed(s_list), reversed(y_list), reversed(rho)):
            a = r * float(s.dot(q))
            alphas.append(a)
            q -= a * y
        if y_list:
            gamma = float(s_list[-1].dot(y_list[-1]) / y_list[-1].dot(y_list[-1]))
        else:
            gamma = 1.0 / max(1.0, float(np.linalg.norm(g)))
        q *= gamma
        for (s, y, r), a in zip(zip(s_list, y_list, rho), reversed(alphas)):
            b = r * float(y.dot(q))
            q += (a - b) * s
        direction = -q
        gd = float(g.dot(direction))
        if gd >= 0:  # curvature gone bad; fall back to steepest descent
            direction = -g
            gd = -float(g.dot(g))
            s_list.clear(); y_list.clear(); rho.clear()
        if gd == 0.0:
            break

        step = 1.0
        accepted = False
        for _bt in range(60):
            x_new = x + step * direction
            f_new, g_new = fun(x_new)
            if np.isfinite(f_new) and f_new <= f + c1 * step * gd:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break

        s = x_new - x
        y = g_new - g
        sy = float(s.dot(y))
        if sy > 1e-12:
            s_list.append(s)
            y_list.append(y)
            rho.append(1.0 / sy)
            if len(s_list) > memory:
                s_list.pop(0); y_list.pop(0); rho.pop(0)

        rel_change = abs(f - f_new) / max(1.0, abs(f))
        x, f, g = x_new, f_new, g_new
        history.append(f)
        logger.debug("iter %d loss %.10f step %.3g", len(history) - 1, f, step)
        if rel_change < tol:
            break
    return x, history


def train(corpus: Corpus, lexicon: PinyinLexicon,
          config: TrainConfig = TrainConfig()) -> CrfModel:
    """Fit emission/transition weights on span-annotated instances.

    Deterministic for a fixed (corpus order, config): zero initialization,
    scan-order feature interning, batch objective.
    """
    if not len(corpus):
        raise TrainingError("cannot train on an empty corpus")

    batch = []
    feature_order: list[str] = []
    seen = set()
    for inst in corpus:
        feats = featurize(inst.text, lexicon)
        gold = [LABEL_INDEX[t] for t in tags_from_span(len(inst.text), inst.span)]
        batch.append((feats, gold))
        for position in feats:
            for f in position:
                if f not in seen:
                    seen.add(f)
                    feature_order.append(f)

    model = CrfModel.zeros(feature_order)
    n_feat = len(feature_order)

    def objective(x: np.ndarray):
        model.emissions = x[:n_feat * 3].reshape(n_feat, 3)
        model.transitions = x[n_feat * 3:].reshape(3, 3)
        loss, ge, gt = nll_and_gradient(model, batch, config.l2_lambda)
        if not np.isfinite(loss):
            raise TrainingError(
                "non-finite training loss; feature/weight explosion")
        return loss, np.concatenate([ge.ravel(), gt.ravel()])

    x0 = np.zeros(n_feat * 3 + 9)
    x, history = _lbfgs(objective, x0,
                        max_iterations=config.max_iterations,
                        tol=config.convergence_tol)
    model.emissions = x[:n_feat * 3].reshape(n_feat, 3).copy()
    model.transitions = x[n_feat * 3:].reshape(3, 3).copy()
    model.template_version = TEMPLATE_VERSION
    model.trained_on = {
        "corpus": corpus.name,
        "instances": len(corpus),
        "l2_lambda": config.l2_lambda,
        "max_iterations": config.max_iterations,
        "convergence_tol": config.convergence_tol,
        "seed": config.seed,
        "iterations": len(history) - 1,
        "final_loss": history[-1],
    }
    model.loss_history = history  # kept for monotonicity checks/logging
    for i, value in enumerate(history):
        logger.info("training iteration %d: loss %.6f", i, value)
    return model
