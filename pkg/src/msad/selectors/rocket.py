"""Random convolutional kernel features with a linear classifier on top."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_array, check_is_fitted

from .linear import SoftmaxRegression

KERNEL_LENGTHS = (7, 9, 11)


def generate_kernels(input_length, n_kernels, random_state=None):
    """Random kernel bank: weights, bias, dilation and padding per kernel."""
    rng = check_random_state(random_state)
    kernels = []
    for _ in range(n_kernels):
        length = int(rng.choice(KERNEL_LENGTHS))
        weights = rng.normal(0.0, 1.0, length)
        weights -= weights.mean()
        bias = rng.uniform(-1.0, 1.0)
        max_exp = np.log2(max((input_length - 1) / (length - 1), 1.0))
        dilation = int(2 ** rng.uniform(0, max_exp))
        padding = ((length - 1) * dilation) // 2 if rng.randint(2) else 0
        kernels.append((weights, bias, dilation, padding))
    return kernels


def apply_kernels(X, kernels):
    """Proportion of positive values and max of every kernel response.

    Returns an array of shape ``(n_samples, 2 * n_kernels)``.
    """
    X = np.asarray(X, dtype=float)
    n, length = X.shape
    out = np.empty((n, 2 * len(kernels)))
    for i, (weights, bias, dilation, padding) in enumerate(kernels):
        span = (len(weights) - 1) * dilation
        Xp = np.pad(X, ((0, 0), (padding, padding))) if padding else X
        n_out = Xp.shape[1] - span
        if n_out <= 0:
            # kernel wider than the padded input: no valid position
            out[:, 2 * i] = 0.0
            out[:, 2 * i + 1] = bias
            continue
        conv = np.full((n, n_out), bias)
        for k, w in enumerate(weights):
            conv += w * Xp[:, k * dilation: k * dilation + n_out]
        out[:, 2 * i] = np.mean(conv > 0, axis=1)
        out[:, 2 * i + 1] = conv.max(axis=1)
    return out


class RocketLiteClassifier(ClassifierMixin, BaseEstimator):
    """Random kernel transform followed by a ridge-penalized softmax classifier.

    Parameters
    ----------
    n_kernels : int, default=500
    alpha : float, default=1.0
        L2 penalty on the linear weights.
    class_weight : {"balanced", None}, default="balanced"
    random_state : int, RandomState or None
    """

    def __init__(self, n_kernels=500, alpha=1.0, class_weight="balanced", random_state=None):
        self.n_kernels = n_kernels
        self.alpha = alpha
        self.class_weight = class_weight
        self.random_state = random_state

    def fit(self, X, y):
        X = check_array(X)
        y = np.asarray(y)
        self.classes_, y_idx = np.unique(y, return_inverse=True)
        self.kernels_ = generate_kernels(X.shape[1], self.n_kernels, self.random_state)
        F = apply_kernels(X, self.kernels_)
        self.mean_ = F.mean(axis=0)
        sd = F.std(axis=0)
        self.scale_ = np.where(sd > 0, sd, 1.0)
        self.linear_ = SoftmaxRegression(
            len(self.classes_), alpha=self.alpha, balanced=self.class_weight == "balanced"
        ).fit((F - self.mean_) / self.scale_, y_idx)
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "linear_")
        F = apply_kernels(check_array(X), self.kernels_)
        return self.linear_.predict_proba((F - self.mean_) / self.scale_)

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]
