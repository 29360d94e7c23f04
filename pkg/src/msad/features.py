"""Minimal per-window statistics used by the feature-based selectors."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.preprocessing import StandardScaler
from sklearn.utils.validation import check_array

FEATURE_NAMES = (
    "sum",
    "mean",
    "median",
    "length",
    "standard_deviation",
    "variance",
    "minimum",
    "maximum",
    "root_mean_square",
)


def extract_minimal(windows) -> np.ndarray:
    """The nine minimal statistics of each window.

    Parameters
    ----------
    windows : array-like of shape (n_windows, length) or (length,)

    Returns
    -------
    ndarray of shape (n_windows, 9) or (9,), columns in ``FEATURE_NAMES`` order.
    """
    w = np.asarray(windows, dtype=float)
    single = w.ndim == 1
    w = np.atleast_2d(w)
    if w.shape[1] == 0:
        raise ValueError("cannot extract features from an empty window")
    var = w.var(axis=1)
    out = np.column_stack(
        [
            w.sum(axis=1),
            w.mean(axis=1),
            np.median(w, axis=1),
            np.full(len(w), w.shape[1], dtype=float),
            np.sqrt(var),
            var,
            w.min(axis=1),
            w.max(axis=1),
            np.sqrt(np.mean(w**2, axis=1)),
        ]
    )
    return out[0] if single else out


class MinimalFeatures(TransformerMixin, BaseEstimator):
    """Stateless transformer wrapping :func:`extract_minimal`."""

    def fit(self, X, y=None):
        X = check_array(X)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        return extract_minimal(check_array(X))

    def get_feature_names_out(self, input_features=None):
        return np.asarray(FEATURE_NAMES, dtype=object)


def fit_feature_scaler(features) -> StandardScaler:
    """Per-feature standardization fitted on training features.

    Constant columns keep unit scale, so they map to 0 rather than NaN.
    """
    return StandardScaler().fit(np.atleast_2d(np.asarray(features, dtype=float)))


def apply_scaler(scaler: StandardScaler, features) -> np.ndarray:
    features = np.asarray(features, dtype=float)
    out = scaler.transform(np.atleast_2d(features))
    return out[0] if features.ndim == 1 else out
