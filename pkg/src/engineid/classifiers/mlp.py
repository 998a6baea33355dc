"""Feedforward network with softmax output, trained by SGD with momentum.

Weights initialize from a seeded uniform distribution scaled by fan-in
(U(-1/sqrt(fan_in), +1/sqrt(fan_in))), biases start at zero.  The
loss/gradient function is separate from the training loop so the full
backpropagation can be checked against central finite differences.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, DivergenceError

_ACTIVATIONS = {
    "relu": (lambda a: np.maximum(0.0, a), lambda a, h: (a > 0.0).astype(float)),
    "tanh": (np.tanh, lambda a, h: 1.0 - h**2),
}


def mlp_loss_grad(weights, biases, activation, X, Y, l2=0.0):
    """Mean softmax cross-entropy (+ L2 on weights); returns (loss, gWs, gbs)."""
    act, act_grad = _ACTIVATIONS[activation]
    n = len(X)
    hidden = [X]
    pre = []
    for W, b in zip(weights[:-1], biases[:-1]):
        a = hidden[-1] @ W.T + b
        pre.append(a)
        hidden.append(act(a))
    logits = hidden[-1] @ weights[-1].T + biases[-1]

    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.sum(np.exp(shifted), axis=1, keepdims=True))
    log_probs = shifted - log_norm
    loss = float(-np.mean(np.sum(Y * log_probs, axis=1)))
    if l2 > 0:
        loss += 0.5 * l2 * sum(float(np.sum(W * W)) for W in weights)

    delta = (np.exp(log_probs) - Y) / n
    grad_w = [None] * len(weights)
    grad_b = [None] * len(biases)
    for layer in range(len(weights) - 1, -1, -1):
        grad_w[layer] = delta.T @ hidden[layer]
        if l2 > 0:
            grad_w[layer] += l2 * weights[layer]
        grad_b[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ weights[layer]) * act_grad(pre[layer - 1],
                                                        hidden[layer])
    return loss, grad_w, grad_b


def softmax(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


class MlpPredictor:
    def __init__(self, weights, biases, activation):
        self.weights = [np.asarray(W, dtype=np.float64) for W in weights]
        self.biases = [np.asarray(b, dtype=np.float64) for b in biases]
        self.activation = activation

    def predict_scores(self, X):
        act, _ = _ACTIVATIONS[self.activation]
        h = np.atleast_2d(X)
        for W, b in zip(self.weights[:-1], self.biases[:-1]):
            h = act(h @ W.T + b)
        return softmax(h @ self.weights[-1].T + self.biases[-1])

    def to_params(self):
        return {
            "activation": self.activation,
            "weights": [W.tolist() for W in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_params(cls, params):
        return cls(params["weights"], params["biases"], params["activation"])


def init_parameters(layer_sizes, rng):
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def train(X, y, n_classes, spec):
    hidden = spec.get("hidden_layers", [16])
    activation = spec.get("activation", "relu")
    epochs = int(spec.get("epochs", 60))
    lr = float(spec.get("learning_rate", 0.5))
    momentum = float(spec.get("momentum", 0.9))
    l2 = float(spec.get("l2", 0.0))
    batch_size = spec.get("batch_size")  # None = full batch

    if not hidden:
        raise ConfigError("mlp requires at least one hidden layer")
    if activation not in _ACTIVATIONS:
        raise ConfigError(f"activation must be one of {sorted(_ACTIVATIONS)}")
    if epochs < 1 or lr <= 0:
        raise ConfigError("mlp requires epochs >= 1 and learning_rate > 0")
    if not 0.0 <= momentum < 1.0:
        raise ConfigError("momentum must be in [0, 1)")
    if batch_size is not None and int(batch_size) < 1:
        raise ConfigError("batch_size must be >= 1 or null")

    n, d = X.shape
    sizes = [d] + [int(h) for h in hidden] + [n_classes]
    rng = np.random.default_rng(spec.seed)
    weights, biases = init_parameters(sizes, rng)
    vel_w = [np.zeros_like(W) for W in weights]
    vel_b = [np.zeros_like(b) for b in biases]
    Y = np.zeros((n, n_classes))
    Y[np.arange(n), y] = 1.0

    def step(xb, yb):
        loss, gw, gb = mlp_loss_grad(weights, biases, activation, xb, yb, l2)
        for i in range(len(weights)):
            vel_w[i] = momentum * vel_w[i] - lr * gw[i]
            vel_b[i] = momentum * vel_b[i] - lr * gb[i]
            weights[i] += vel_w[i]
            biases[i] += vel_b[i]
        return loss

    for epoch in range(epochs):
        if batch_size is None:
            loss = step(X, Y)
        else:
            order = rng.permutation(n)
            size = int(batch_size)
            loss = 0.0
            for start in range(0, n, size):
                batch = order[start : start + size]
                loss = step(X[batch], Y[batch])
        if not np.isfinite(loss):
            raise DivergenceError(epoch)
    return MlpPredictor(weights, biases, activation)
