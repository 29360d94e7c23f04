"""L2-regularized multinomial logistic regression on dense features."""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize
from scipy.special import log_softmax, softmax


def class_weights(y, n_classes):
    """Inverse-frequency weights, normalized so that present classes average to 1."""
    counts = np.bincount(y, minlength=n_classes).astype(float)
    present = counts > 0
    w = np.zeros(n_classes)
    w[present] = counts[present].sum() / (present.sum() * counts[present])
    return w


class SoftmaxRegression:
    """Multinomial linear classifier fitted by L-BFGS on the weighted
    cross-entropy plus ``alpha * ||W||^2 / 2``.

    Labels must already be integers in ``[0, n_classes)``.
    """

    def __init__(self, n_classes, alpha=1.0, max_iter=500, balanced=True):
        self.n_classes = n_classes
        self.alpha = alpha
        self.max_iter = max_iter
        self.balanced = balanced

    def _unpack(self, theta, d):
        k = self.n_classes
        return theta[: d * k].reshape(d, k), theta[d * k:]

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        n, d = X.shape
        k = self.n_classes
        sw = class_weights(y, k)[y] if self.balanced else np.ones(n)
        sw = sw / sw.sum()
        onehot = np.eye(k)[y]

        def objective(theta):
            W, b = self._unpack(theta, d)
            logits = X @ W + b
            logp = log_softmax(logits, axis=1)
            loss = -np.sum(sw * np.sum(onehot * logp, axis=1)) + 0.5 * self.alpha * np.sum(W**2) / n
            delta = (np.exp(logp) - onehot) * sw[:, None]
            gW = X.T @ delta + self.alpha * W / n
            gb = delta.sum(axis=0)
            return loss, np.concatenate([gW.ravel(), gb])

        theta0 = np.zeros(d * k + k)
        res = minimize(objective, theta0, jac=True, method="L-BFGS-B", options={"maxiter": self.max_iter})
        self.coef_, self.intercept_ = self._unpack(res.x, d)
        self.n_iter_ = res.nit
        return self

    def predict_proba(self, X):
        return softmax(np.asarray(X, dtype=float) @ self.coef_ + self.intercept_, axis=1)
