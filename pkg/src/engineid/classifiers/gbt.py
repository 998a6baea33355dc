"""Multiclass gradient-boosted trees with softmax loss and Newton leaves.

Per round, one regression tree per class fits the negative gradient
(one-hot minus predicted probability); leaves hold sum(residual) /
sum(hessian) with hessian p(1-p), epsilon-floored.  The "_rf" flavor adds
per-round row subsampling (0.8 without replacement) and per-node sqrt(D)
feature subsampling.  Training log-loss per round is recorded so monitored
runs can assert it is non-increasing.

This is the model family, not a port of any boosting system: no
sparsity-aware split finding, no histogramming, no column blocks.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from ..synth import derive_seed
from . import tree as tree_mod
from .mlp import softmax


class GbtPredictor:
    def __init__(self, trees, learning_rate, n_classes, train_loss=None):
        self.trees = trees  # trees[round][class]
        self.learning_rate = float(learning_rate)
        self.n_classes = int(n_classes)
        self.train_loss = list(train_loss) if train_loss is not None else []

    def decision_scores(self, X):
        X = np.atleast_2d(X)
        F = np.zeros((len(X), self.n_classes))
        for round_trees in self.trees:
            for c, t in enumerate(round_trees):
                leaves = t.apply(X)
                F[:, c] += self.learning_rate * np.array(
                    [t.payload[leaf][0] for leaf in leaves]
                )
        return F

    def predict_scores(self, X):
        return softmax(self.decision_scores(X))

    def to_params(self):
        return {
            "learning_rate": self.learning_rate,
            "n_classes": self.n_classes,
            "train_loss": self.train_loss,
            "trees": [[t.to_dict() for t in round_trees]
                      for round_trees in self.trees],
        }

    @classmethod
    def from_params(cls, params):
        trees = [[tree_mod.Tree.from_dict(d) for d in round_trees]
                 for round_trees in params["trees"]]
        return cls(trees, params["learning_rate"], params["n_classes"],
                   params.get("train_loss"))


def train(X, y, n_classes, spec, rf_flavor=False):
    n_rounds = int(spec.get("n_rounds", 30))
    lr = float(spec.get("learning_rate", 0.3))
    max_depth = int(spec.get("max_depth", 3))
    min_samples_split = int(spec.get("min_samples_split", 2))
    subsample = float(spec.get("subsample", 0.8 if rf_flavor else 1.0))
    if n_rounds < 1:
        raise ConfigError("gbt requires n_rounds >= 1")
    if not 0.0 < lr <= 1.0:
        raise ConfigError("gbt learning_rate must be in (0, 1]")
    if max_depth < 1:
        raise ConfigError("gbt requires max_depth >= 1")
    if not 0.0 < subsample <= 1.0:
        raise ConfigError("gbt subsample must be in (0, 1]")

    n, d = X.shape
    feature_count = max(1, int(round(np.sqrt(d)))) if rf_flavor else None
    Y = np.zeros((n, n_classes))
    Y[np.arange(n), y] = 1.0
    F = np.zeros((n, n_classes))
    all_trees = []
    train_loss = []

    for r in range(n_rounds):
        P = softmax(F)
        if subsample < 1.0:
            row_rng = np.random.default_rng(derive_seed(spec.seed, "rows", r))
            rows = np.sort(row_rng.choice(n, size=max(2, int(round(subsample * n))),
                                          replace=False))
        else:
            rows = np.arange(n)
        residual = Y - P
        hessian = P * (1.0 - P)
        round_trees = []
        for c in range(n_classes):
            rng = np.random.default_rng(derive_seed(spec.seed, "tree", r, c))
            t = tree_mod.grow_regression_tree(
                X[rows], residual[rows, c], hessian[rows, c],
                max_depth=max_depth,
                min_samples_split=min_samples_split,
                max_features=feature_count if (feature_count is not None
                                               and feature_count < d) else None,
                rng=rng,
            )
            leaves = t.apply(X)
            F[:, c] += lr * np.array([t.payload[leaf][0] for leaf in leaves])
            round_trees.append(t)
        all_trees.append(round_trees)
        log_probs = np.log(np.maximum(softmax(F)[np.arange(n), y], 1e-300))
        train_loss.append(float(-np.mean(log_probs)))

    return GbtPredictor(all_trees, lr, n_classes, train_loss)
