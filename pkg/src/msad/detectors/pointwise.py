"""Point based detectors: histogram (HBOS) and polynomial forecasting (POLY)."""

from __future__ import annotations

import math

import numpy as np

from .base import BaseDetector


class HBOS(BaseDetector):
    """Histogram-based outlier score over the values of the series.

    Each point scores ``-log(h + eps)`` where ``h`` is the height of its bin
    relative to the tallest bin. ``n_bins=None`` uses ``ceil(sqrt(n))``.
    """

    needs_window = False

    def __init__(self, n_bins=None, eps=1e-12):
        self.n_bins = n_bins
        self.eps = eps

    def _raw_scores(self, x, window):
        lo, hi = x.min(), x.max()
        if hi == lo:
            return np.zeros_like(x)
        bins = self.n_bins or math.ceil(math.sqrt(x.size))
        width = (hi - lo) / bins
        idx = np.minimum(((x - lo) / width).astype(int), bins - 1)
        counts = np.bincount(idx, minlength=bins)
        height = counts / counts.max()
        return -np.log(height[idx] + self.eps)


def forecast_filter(window, degree):
    """Weights ``c`` such that ``c @ x[t-window:t]`` is the degree-``degree``
    least-squares polynomial extrapolated one step ahead."""
    if degree >= window:
        raise ValueError(f"POLY: degree {degree} needs a window longer than {degree}")
    pos = np.arange(window + 1, dtype=float) / window
    vander = np.vander(pos, degree + 1, increasing=True)
    return vander[-1] @ np.linalg.pinv(vander[:-1])


class POLY(BaseDetector):
    """Absolute one-step error of a polynomial fitted on the preceding ``window`` points."""

    def __init__(self, window="auto", degree=3):
        self.window = window
        self.degree = degree

    def _raw_scores(self, x, window):
        coef = forecast_filter(window, self.degree)
        # pred[t - window] forecasts x[t] from x[t-window:t]
        pred = np.correlate(x[:-1], coef, mode="valid")
        err = np.abs(x[window:] - pred)
        return np.concatenate([np.full(window, err[0]), err])
