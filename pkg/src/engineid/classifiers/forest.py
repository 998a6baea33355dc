"""Random forest: bagged CART trees with per-node feature subsets.

Each tree gets a sub-seed derived from (model seed, tree index), driving
both its bootstrap resample and its per-node feature draws, so forests are
reproducible and trees are order-independent.  Prediction is a majority
vote over tree predictions; vote ties resolve to the lowest class id.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from ..synth import derive_seed
from . import tree as tree_mod


class ForestPredictor:
    def __init__(self, trees, n_classes):
        self.trees = trees
        self.n_classes = int(n_classes)

    def predict_scores(self, X):
        X = np.atleast_2d(X)
        votes = np.zeros((len(X), self.n_classes))
        for t in self.trees:
            leaves = t.apply(X)
            for i, leaf in enumerate(leaves):
                counts = t.payload[leaf]
                votes[i, int(np.argmax(counts))] += 1
        return votes / len(self.trees)

    def to_params(self):
        return {
            "n_classes": self.n_classes,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_params(cls, params):
        trees = [tree_mod.Tree.from_dict(d) for d in params["trees"]]
        return cls(trees, params["n_classes"])


class TreePredictor:
    """Single CART tree; scores are the leaf's class frequencies."""

    def __init__(self, tree, n_classes):
        self.tree = tree
        self.n_classes = int(n_classes)

    def predict_scores(self, X):
        X = np.atleast_2d(X)
        leaves = self.tree.apply(X)
        scores = np.zeros((len(X), self.n_classes))
        for i, leaf in enumerate(leaves):
            counts = self.tree.payload[leaf]
            scores[i] = counts / max(counts.sum(), 1)
        return scores

    def to_params(self):
        return {"n_classes": self.n_classes, "tree": self.tree.to_dict()}

    @classmethod
    def from_params(cls, params):
        return cls(tree_mod.Tree.from_dict(params["tree"]), params["n_classes"])


def train_tree(X, y, n_classes, spec):
    max_depth = spec.get("max_depth")  # None = unlimited
    min_samples_split = int(spec.get("min_samples_split", 2))
    if max_depth is not None and int(max_depth) < 1:
        raise ConfigError("decision_tree requires max_depth >= 1 or null")
    if min_samples_split < 2:
        raise ConfigError("decision_tree requires min_samples_split >= 2")
    grown = tree_mod.grow_classification_tree(
        X, y, n_classes,
        max_depth=None if max_depth is None else int(max_depth),
        min_samples_split=min_samples_split,
    )
    return TreePredictor(grown, n_classes)


def train_forest(X, y, n_classes, spec):
    n_trees = int(spec.get("n_trees", 20))
    max_features = spec.get("max_features", 0.05)
    max_depth = spec.get("max_depth")
    min_samples_split = int(spec.get("min_samples_split", 2))
    bootstrap = bool(spec.get("bootstrap", True))
    if n_trees < 1:
        raise ConfigError("random_forest requires n_trees >= 1")
    if not 0.0 < float(max_features) <= 1.0:
        raise ConfigError("random_forest max_features must be a fraction in (0, 1]")

    n, d = X.shape
    feature_count = max(1, int(round(float(max_features) * d)))
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng(derive_seed(spec.seed, "tree", t))
        idx = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        grown = tree_mod.grow_classification_tree(
            X[idx], y[idx], n_classes,
            max_depth=None if max_depth is None else int(max_depth),
            min_samples_split=min_samples_split,
            max_features=feature_count if feature_count < d else None,
            rng=rng,
        )
        trees.append(grown)
    return ForestPredictor(trees, n_classes)
