"""A single convolutional block classifier trained with mini-batch SGD.

Architecture: conv1d (kernel 3, ``n_filters`` filters, zero "same"
padding) -> ReLU -> global average pooling -> dense -> softmax. Everything
is plain numpy with hand-written gradients.
"""

from __future__ import annotations

import numpy as np
from scipy.special import log_softmax, softmax
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_array, check_is_fitted

from .linear import class_weights

KERNEL = 3


def _patches(X):
    Xp = np.pad(X, ((0, 0), (1, 1)))
    return np.lib.stride_tricks.sliding_window_view(Xp, KERNEL, axis=1)


def init_params(n_classes, n_filters, rng):
    return {
        "W": rng.normal(0.0, np.sqrt(2.0 / KERNEL), (n_filters, KERNEL)),
        "b": np.zeros(n_filters),
        "V": rng.normal(0.0, np.sqrt(1.0 / n_filters), (n_filters, n_classes)),
        "c": np.zeros(n_classes),
    }


def forward(params, X):
    """Logits plus the intermediates needed for the backward pass."""
    P = _patches(X)
    Z = P @ params["W"].T + params["b"]
    H = np.maximum(Z, 0.0)
    G = H.mean(axis=1)
    logits = G @ params["V"] + params["c"]
    return logits, (P, Z, G)


def loss_and_grad(params, X, y, sample_weight):
    """Weighted cross-entropy ``sum(w_i * ce_i) / sum(w_i)`` and its gradient."""
    logits, (P, Z, G) = forward(params, X)
    logp = log_softmax(logits, axis=1)
    rows = np.arange(len(y))
    norm = sample_weight.sum()
    loss = -np.sum(sample_weight * logp[rows, y]) / norm

    dlogits = np.exp(logp)
    dlogits[rows, y] -= 1.0
    dlogits *= (sample_weight / norm)[:, None]
    grads = {"V": G.T @ dlogits, "c": dlogits.sum(axis=0)}
    dG = dlogits @ params["V"].T
    dZ = (Z > 0) * (dG[:, None, :] / Z.shape[1])
    grads["W"] = np.einsum("btf,btk->fk", dZ, P)
    grads["b"] = dZ.sum(axis=(0, 1))
    return loss, grads


class ConvLiteClassifier(ClassifierMixin, BaseEstimator):
    """One-block convolutional network for fixed-length windows.

    Parameters
    ----------
    n_filters : int, default=32
    learning_rate : float, default=0.01
    momentum : float, default=0.9
    batch_size : int, default=64
    max_epochs : int, default=100
    patience : int, default=10
        Epochs without improvement of the validation accuracy (training loss
        when no validation data is given) before stopping.
    class_weight : {"balanced", None}, default="balanced"
    random_state : int, RandomState or None

    Attributes
    ----------
    params_ : dict
        Best parameters seen during training.
    history_ : list of dict
        Per-epoch training loss and validation accuracy.
    """

    def __init__(
        self,
        n_filters=32,
        learning_rate=0.01,
        momentum=0.9,
        batch_size=64,
        max_epochs=100,
        patience=10,
        class_weight="balanced",
        random_state=None,
    ):
        self.n_filters = n_filters
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.batch_size = batch_size
        self.max_epochs = max_epochs
        self.patience = patience
        self.class_weight = class_weight
        self.random_state = random_state

    def fit(self, X, y, X_val=None, y_val=None):
        X = check_array(X)
        self.classes_, y_idx = np.unique(np.asarray(y), return_inverse=True)
        k = len(self.classes_)
        rng = check_random_state(self.random_state)
        params = init_params(k, self.n_filters, rng)
        velocity = {name: np.zeros_like(p) for name, p in params.items()}
        if self.class_weight == "balanced":
            sw = class_weights(y_idx, k)[y_idx]
        else:
            sw = np.ones(len(y_idx))

        has_val = X_val is not None and len(X_val) > 0
        if has_val:
            X_val = check_array(X_val)
            y_val = np.asarray(y_val)

        best, best_score, stale = None, -np.inf, 0
        self.history_ = []
        n = len(X)
        for epoch in range(self.max_epochs):
            order = rng.permutation(n)
            for start in range(0, n, self.batch_size):
                batch = order[start:start + self.batch_size]
                _, grads = loss_and_grad(params, X[batch], y_idx[batch], sw[batch])
                for name in params:
                    velocity[name] = self.momentum * velocity[name] - self.learning_rate * grads[name]
                    params[name] = params[name] + velocity[name]
            train_loss, _ = loss_and_grad(params, X, y_idx, sw)
            record = {"epoch": epoch, "train_loss": float(train_loss)}
            if has_val:
                pred = self.classes_[np.argmax(forward(params, X_val)[0], axis=1)]
                record["val_accuracy"] = float(np.mean(pred == y_val))
                score = record["val_accuracy"]
            else:
                score = -train_loss
            self.history_.append(record)
            if score > best_score:
                best, best_score, stale = {kk: v.copy() for kk, v in params.items()}, score, 0
            else:
                stale += 1
                if stale >= self.patience:
                    break
        self.params_ = best
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "params_")
        return softmax(forward(self.params_, check_array(X))[0], axis=1)

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]
