"""k-nearest-neighbors on Euclidean distance.

Deterministic tie handling: equidistant training rows rank by lower row
index (stable argsort), vote ties resolve to the lowest class id.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError


class KnnPredictor:
    def __init__(self, X, y, k, n_classes):
        self.X = np.asarray(X, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.int64)
        self.k = int(k)
        self.n_classes = int(n_classes)

    def predict_scores(self, X):
        X = np.atleast_2d(X)
        scores = np.zeros((len(X), self.n_classes))
        for i, query in enumerate(X):
            d2 = np.sum((self.X - query) ** 2, axis=1)
            nearest = np.argsort(d2, kind="stable")[: self.k]
            votes = np.bincount(self.y[nearest], minlength=self.n_classes)
            scores[i] = votes / self.k
        return scores

    def to_params(self):
        return {
            "k": self.k,
            "n_classes": self.n_classes,
            "X": self.X.tolist(),
            "y": self.y.tolist(),
        }

    @classmethod
    def from_params(cls, params):
        return cls(np.asarray(params["X"], dtype=np.float64),
                   np.asarray(params["y"], dtype=np.int64),
                   params["k"], params["n_classes"])


def train(X, y, n_classes, spec):
    k = int(spec.get("k", 5))
    if k < 1:
        raise ConfigError("knn requires k >= 1")
    if k > len(X):
        raise ConfigError(f"knn k={k} exceeds {len(X)} training rows")
    return KnnPredictor(X, y, k, n_classes)
