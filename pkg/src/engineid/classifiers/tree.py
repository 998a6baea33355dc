"""CART trees: greedy binary splits over (feature, midpoint threshold).

Classification trees minimize weighted Gini impurity; regression trees (used
by gradient boosting) minimize within-child squared error and carry Newton
numerator/denominator sums in their leaves.  Scan order is deterministic:
ascending feature index, ascending threshold, first optimum wins.  Samples
with value <= threshold go left.

The per-feature scan runs on the compiled kernel when available and on the
pure NumPy twin otherwise; both pick identical splits.
"""

from __future__ import annotations

import numpy as np

from .. import _kernels
from ..errors import TrainingError

LEAF = -1
_HESS_EPS = 1e-12


class Tree:
    """Flat-array binary tree; node 0 is the root.

    feature[i] == LEAF marks a leaf; payload[i] is the leaf's class-count
    vector (classification) or scalar value (regression).
    """

    def __init__(self, feature, threshold, left, right, payload):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.payload = payload  # list, indexed by node

    @property
    def n_nodes(self):
        return len(self.feature)

    def apply(self, X) -> np.ndarray:
        """Leaf index for every row of X."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        out = np.zeros(len(X), dtype=np.int64)
        stack = [(0, np.arange(len(X)))]
        while stack:
            node, idx = stack.pop()
            if len(idx) == 0:
                continue
            if self.feature[node] == LEAF:
                out[idx] = node
                continue
            goes_left = X[idx, self.feature[node]] <= self.threshold[node]
            stack.append((self.left[node], idx[goes_left]))
            stack.append((self.right[node], idx[~goes_left]))
        return out

    def to_dict(self):
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "payload": [np.asarray(p).tolist() if p is not None else None
                        for p in self.payload],
        }

    @classmethod
    def from_dict(cls, data):
        payload = [None if p is None else np.asarray(p, dtype=np.float64)
                   for p in data["payload"]]
        return cls(data["feature"], data["threshold"], data["left"],
                   data["right"], payload)


def _candidate_features(n_features, max_features, rng):
    if max_features is None or max_features >= n_features:
        return np.arange(n_features)
    chosen = rng.choice(n_features, size=max_features, replace=False)
    return np.sort(chosen)


def _best_split(X, idx, features, scan_feature):
    best_proxy = -np.inf
    best_feature = -1
    best_threshold = np.nan
    for f in features:
        x = X[idx, f]
        order = np.argsort(x, kind="stable")
        proxy, threshold = scan_feature(np.ascontiguousarray(x[order]), order)
        if proxy > best_proxy:
            best_proxy = proxy
            best_feature = int(f)
            best_threshold = threshold
    return best_proxy, best_feature, best_threshold


class _Builder:
    def __init__(self, X, max_depth, min_samples_split, max_features, rng):
        self.X = X
        self.max_depth = max_depth
        self.min_samples_split = max(2, min_samples_split)
        self.max_features = max_features
        self.rng = rng
        self.feature = []
        self.threshold = []
        self.left = []
        self.right = []
        self.payload = []

    def new_node(self):
        self.feature.append(LEAF)
        self.threshold.append(np.nan)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.payload.append(None)
        return len(self.feature) - 1

    def finish(self):
        return Tree(self.feature, self.threshold, self.left, self.right,
                    self.payload)


def grow_classification_tree(X, y, n_classes, max_depth=None,
                             min_samples_split=2, max_features=None,
                             rng=None) -> Tree:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(X) == 0:
        raise TrainingError("cannot grow a tree on an empty dataset")
    builder = _Builder(X, max_depth, min_samples_split, max_features, rng)

    def build(idx, depth):
        node = builder.new_node()
        counts = np.bincount(y[idx], minlength=n_classes).astype(np.int64)
        builder.payload[node] = counts
        n = len(idx)
        if (np.count_nonzero(counts) <= 1
                or n < builder.min_samples_split
                or (builder.max_depth is not None and depth >= builder.max_depth)):
            return node
        features = _candidate_features(X.shape[1], builder.max_features,
                                       builder.rng)
        y_node = y[idx]
        proxy, feat, thr = _best_split(
            X, idx, features,
            lambda xs, order: _kernels.scan_split_gini(xs, y_node[order], n_classes),
        )
        # No-split proxy: sum of squared counts over n; a split must beat it.
        node_proxy = float(np.sum(counts * counts)) / n
        if feat < 0 or proxy <= node_proxy:
            return node
        goes_left = X[idx, feat] <= thr
        builder.feature[node] = feat
        builder.threshold[node] = thr
        builder.payload[node] = counts  # kept for inspection; leaves drive scores
        builder.left[node] = build(idx[goes_left], depth + 1)
        builder.right[node] = build(idx[~goes_left], depth + 1)
        return node

    build(np.arange(len(X)), 0)
    return builder.finish()


def grow_regression_tree(X, residual, hessian, max_depth=None,
                         min_samples_split=2, max_features=None,
                         rng=None) -> Tree:
    """Squared-error splits on the residual; leaves hold Newton values
    sum(residual) / max(sum(hessian), eps)."""
    X = np.asarray(X, dtype=np.float64)
    residual = np.asarray(residual, dtype=np.float64)
    hessian = np.asarray(hessian, dtype=np.float64)
    if len(X) == 0:
        raise TrainingError("cannot grow a tree on an empty dataset")
    builder = _Builder(X, max_depth, min_samples_split, max_features, rng)

    def leaf_value(idx):
        return np.array([np.sum(residual[idx])
                         / max(np.sum(hessian[idx]), _HESS_EPS)])

    def build(idx, depth):
        node = builder.new_node()
        builder.payload[node] = leaf_value(idx)
        n = len(idx)
        if (n < builder.min_samples_split
                or (builder.max_depth is not None and depth >= builder.max_depth)):
            return node
        features = _candidate_features(X.shape[1], builder.max_features,
                                       builder.rng)
        r_node = residual[idx]
        proxy, feat, thr = _best_split(
            X, idx, features,
            lambda xs, order: _kernels.scan_split_sse(xs, r_node[order]),
        )
        r_sum = float(np.sum(residual[idx]))
        node_proxy = r_sum * r_sum / n
        if feat < 0 or proxy <= node_proxy + 1e-12 * (1.0 + abs(node_proxy)):
            return node
        goes_left = X[idx, feat] <= thr
        builder.feature[node] = feat
        builder.threshold[node] = thr
        builder.left[node] = build(idx[goes_left], depth + 1)
        builder.right[node] = build(idx[~goes_left], depth + 1)
        return node

    build(np.arange(len(X)), 0)
    return builder.finish()
