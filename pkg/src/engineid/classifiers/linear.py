"""One-vs-rest linear models trained by (mini-batch) SGD.

One implementation covers three families: logistic regression (logistic
loss, full-batch default), linear SVC (hinge loss) and the SGD classifier
(per-sample updates).  The loss/gradient pair is exposed separately so tests
can check the analytic gradient against central finite differences.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, DivergenceError


def logistic_loss_grad(W, b, X, Y, l2):
    """Mean binary cross-entropy over samples and classes + L2 on weights.

    Y is the one-vs-rest {0,1} target matrix [n, C]; returns (loss, gW, gb).
    """
    n = len(X)
    Z = X @ W.T + b
    loss = float(np.mean(np.logaddexp(0.0, Z) - Y * Z)
                 + 0.5 * l2 * np.sum(W * W))
    P = 1.0 / (1.0 + np.exp(-Z))
    G = (P - Y) / (n * W.shape[0])
    return loss, G.T @ X + l2 * W, G.sum(axis=0)


def hinge_loss_grad(W, b, X, Y, l2):
    """Mean hinge loss over samples and classes + L2; Y in {0,1} as above."""
    n = len(X)
    S = 2.0 * Y - 1.0
    Z = X @ W.T + b
    margin = 1.0 - S * Z
    loss = float(np.mean(np.maximum(0.0, margin)) + 0.5 * l2 * np.sum(W * W))
    G = np.where(margin > 0.0, -S, 0.0) / (n * W.shape[0])
    return loss, G.T @ X + l2 * W, G.sum(axis=0)


_LOSSES = {"logistic": logistic_loss_grad, "hinge": hinge_loss_grad}


class LinearPredictor:
    def __init__(self, W, b, loss):
        self.W = np.asarray(W, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        self.loss = loss

    def predict_scores(self, X):
        return np.atleast_2d(X) @ self.W.T + self.b

    def to_params(self):
        return {"loss": self.loss, "W": self.W.tolist(), "b": self.b.tolist()}

    @classmethod
    def from_params(cls, params):
        return cls(np.asarray(params["W"]), np.asarray(params["b"]),
                   params["loss"])


def train(X, y, n_classes, spec, default_loss="logistic",
          default_batch=None, default_epochs=100, default_lr=0.5):
    """SGD on the chosen loss; batch_size None means full-batch updates."""
    loss_name = spec.get("loss", default_loss)
    epochs = int(spec.get("epochs", default_epochs))
    lr = float(spec.get("learning_rate", default_lr))
    l2 = float(spec.get("l2", 1e-4))
    batch_size = spec.get("batch_size", default_batch)
    if loss_name not in _LOSSES:
        raise ConfigError(f"loss must be one of {sorted(_LOSSES)}")
    if epochs < 1:
        raise ConfigError("epochs must be >= 1")
    if lr <= 0:
        raise ConfigError("learning_rate must be positive")
    if l2 < 0:
        raise ConfigError("l2 must be >= 0")
    if batch_size is not None and int(batch_size) < 1:
        raise ConfigError("batch_size must be >= 1 or null")

    loss_grad = _LOSSES[loss_name]
    n, d = X.shape
    Y = np.zeros((n, n_classes))
    Y[np.arange(n), y] = 1.0
    W = np.zeros((n_classes, d))
    b = np.zeros(n_classes)
    rng = np.random.default_rng(spec.seed)

    for epoch in range(epochs):
        if batch_size is None:
            _, gW, gb = loss_grad(W, b, X, Y, l2)
            W -= lr * gW
            b -= lr * gb
        else:
            order = rng.permutation(n)
            size = int(batch_size)
            for start in range(0, n, size):
                batch = order[start : start + size]
                _, gW, gb = loss_grad(W, b, X[batch], Y[batch], l2)
                W -= lr * gW
                b -= lr * gb
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
            raise DivergenceError(epoch)
    return LinearPredictor(W, b, loss_name)
