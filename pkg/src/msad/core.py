"""Time series containers, segmentation and score post-processing."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """A univariate series with optional point labels.

    Parameters
    ----------
    values : array-like of shape (n,)
    labels : array-like of shape (n,), optional
        Point labels in {0, 1}.
    series_id : str
    dataset_id : str
        Domain tag, used by the leave-one-dataset-out protocol.
    """

    values: np.ndarray
    labels: Optional[np.ndarray] = None
    series_id: str = ""
    dataset_id: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        if values.size == 0:
            raise ValueError("time series must contain at least one value")
        if not np.all(np.isfinite(values)):
            raise ValueError(f"series {self.series_id!r} contains NaN or infinite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.labels is not None:
            labels = np.asarray(self.labels).ravel()
            if labels.shape != values.shape:
                raise ValueError(
                    f"labels have length {labels.size}, expected {values.size}"
                )
            if not np.all((labels == 0) | (labels == 1)):
                raise ValueError("labels must contain only 0 or 1")
            labels = labels.astype(np.int8)
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.values.size

    @property
    def n(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class Window:
    series_id: str
    start: int
    values: np.ndarray = field(repr=False)

    @property
    def length(self) -> int:
        return len(self.values)


def window_starts(n: int, length: int) -> list[int]:
    """Start offsets of the non-overlapping windows covering ``[0, n)``.

    When ``length`` does not divide ``n`` the first window is anchored at 0
    and the remaining ones are right-aligned, so only the first two windows
    overlap.
    """
    if length <= 0:
        raise ValueError("window length must be positive")
    if length > n:
        raise ValueError(f"window longer than series ({length} > {n})")
    if n % length == 0:
        return list(range(0, n, length))
    n_rest = math.ceil(n / length) - 1
    offset = n - n_rest * length
    return [0] + [offset + i * length for i in range(n_rest)]


def segment(series, length: int) -> list[Window]:
    """Split ``series`` into windows of ``length`` points (see :func:`window_starts`)."""
    if isinstance(series, TimeSeries):
        values, sid = series.values, series.series_id
    else:
        values, sid = np.asarray(series, dtype=float), ""
    return [
        Window(sid, s, values[s:s + length]) for s in window_starts(values.size, length)
    ]


def segment_array(values, length: int) -> np.ndarray:
    """Same as :func:`segment` but returns a ``(n_windows, length)`` array."""
    values = np.asarray(values, dtype=float)
    starts = window_starts(values.size, length)
    return np.stack([values[s:s + length] for s in starts])


def align_score(sub_scores, length: int) -> np.ndarray:
    """Pad subsequence scores back to the length of the series.

    ``sub_scores`` holds ``n - length`` values. The first score is repeated
    ``ceil(length / 2)`` times in front and the last one ``floor(length / 2)``
    times at the end, giving exactly ``n`` values.
    """
    sub_scores = np.asarray(sub_scores, dtype=float).ravel()
    if sub_scores.size == 0:
        raise ValueError("cannot align an empty score sequence")
    if length <= 0:
        raise ValueError("subsequence length must be positive")
    head = np.full(-(-length // 2), sub_scores[0])
    tail = np.full(length // 2, sub_scores[-1])
    return np.concatenate([head, sub_scores, tail])


def minmax_normalize(raw) -> np.ndarray:
    """Rescale to [0, 1]; a constant input maps to 0.5 everywhere."""
    raw = np.asarray(raw, dtype=float)
    if raw.size == 0:
        raise ValueError("cannot normalize an empty sequence")
    if np.isnan(raw).any():
        raise ValueError("scores contain NaN")
    lo, hi = raw.min(), raw.max()
    if not np.isfinite(lo) or not np.isfinite(hi):
        raise ValueError("scores contain infinite values")
    if hi == lo:
        return np.full(raw.shape, 0.5)
    return np.clip((raw - lo) / (hi - lo), 0.0, 1.0)


def znormalize(values, axis: int = -1) -> np.ndarray:
    """Zero mean, unit variance along ``axis``; constant rows become zeros."""
    values = np.asarray(values, dtype=float)
    mu = values.mean(axis=axis, keepdims=True)
    centered = values - mu
    sd = np.sqrt(np.mean(centered**2, axis=axis, keepdims=True))
    # tiny spreads are numerically constant
    scale = np.max(np.abs(values), axis=axis, keepdims=True)
    flat = sd <= 1e-12 * np.maximum(scale, 1.0)
    out = np.divide(centered, sd, out=np.zeros_like(centered), where=~flat)
    return out


def sliding_windows(values, length: int) -> np.ndarray:
    """All ``n - length + 1`` overlapping subsequences as a read-only view."""
    values = np.ascontiguousarray(values, dtype=float)
    return np.lib.stride_tricks.sliding_window_view(values, length)
