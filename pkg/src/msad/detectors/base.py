"""Shared machinery for the univariate anomaly detectors."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..core import TimeSeries, minmax_normalize

AUTO_MIN_LAG = 10
AUTO_FALLBACK = 100
AUTO_MIN_CORR = 0.3


def dominant_period(values, fallback: int = AUTO_FALLBACK) -> int:
    """Period from the highest autocorrelation peak in lags ``[10, n/4]``.

    Returns ``fallback`` when no local maximum reaches a correlation of 0.3.
    """
    x = np.asarray(values, dtype=float)
    n = x.size
    max_lag = n // 4
    if max_lag <= AUTO_MIN_LAG + 1:
        return fallback
    x = x - x.mean()
    denom = np.dot(x, x)
    if denom == 0:
        return fallback
    size = 1 << int(np.ceil(np.log2(2 * n)))
    freq = np.fft.rfft(x, size)
    acf = np.fft.irfft(freq * np.conj(freq), size)[: max_lag + 2] / denom
    lags = np.arange(AUTO_MIN_LAG, max_lag + 1)
    mid = acf[lags]
    peaks = (mid > acf[lags - 1]) & (mid >= acf[lags + 1]) & (mid > AUTO_MIN_CORR)
    if not peaks.any():
        return fallback
    cand = lags[peaks]
    return int(cand[np.argmax(acf[cand])])


def check_series(X) -> np.ndarray:
    """Accept a TimeSeries or 1-d array-like and return finite float values."""
    if isinstance(X, TimeSeries):
        return X.values
    x = np.asarray(X, dtype=float)
    if x.ndim == 2 and 1 in x.shape:
        x = x.ravel()
    if x.ndim != 1:
        raise ValueError(f"expected a univariate series, got shape {x.shape}")
    if x.size == 0:
        raise ValueError("empty series")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains NaN or infinite values")
    return x


class BaseDetector(BaseEstimator):
    """Detector that scores one series at a time.

    Subclasses implement ``_raw_scores(x, window)`` returning ``n`` raw
    scores (higher is more anomalous). ``fit`` stores them in
    ``decision_scores_``; ``score_series`` returns them min-max normalized.
    """

    #: whether the detector needs a window length
    needs_window = True

    def _resolve_window(self, x):
        if not self.needs_window:
            return None
        window = getattr(self, "window", "auto")
        if window == "auto":
            window = dominant_period(x)
        window = int(window)
        if window < 1:
            raise ValueError(f"{type(self).__name__}: window must be positive")
        if x.size < window + 1:
            raise ValueError(
                f"{type(self).__name__}: series of length {x.size} is too short "
                f"for window {window}"
            )
        return window

    def fit(self, X, y=None):
        x = check_series(X)
        self.window_ = self._resolve_window(x)
        raw = np.asarray(self._raw_scores(x, self.window_), dtype=float)
        if raw.shape != x.shape:
            raise RuntimeError(f"{type(self).__name__} produced {raw.size} scores for {x.size} points")
        self.decision_scores_ = raw
        return self

    def score_series(self, X) -> np.ndarray:
        """Fit on ``X`` and return normalized scores in [0, 1]."""
        return minmax_normalize(self.fit(X).decision_scores_)

    @property
    def normalized_scores_(self):
        check_is_fitted(self, "decision_scores_")
        return minmax_normalize(self.decision_scores_)
