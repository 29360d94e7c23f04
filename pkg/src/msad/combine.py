"""Turning per-window selector output into detector weights and a combined score."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import TimeSeries, segment_array

STRATEGIES = ("average", "vote")


def _distributions(dists):
    P = np.atleast_2d(np.asarray(dists, dtype=float))
    if P.size == 0 or len(P) == 0:
        raise ValueError("need at least one distribution")
    return P


def aggregate_average(dists) -> np.ndarray:
    """Mean distribution over windows."""
    return _distributions(dists).mean(axis=0)


def aggregate_vote(dists) -> np.ndarray:
    """Number of windows whose most likely detector is each detector.

    Ties within a window go to the lowest detector id.
    """
    P = _distributions(dists)
    return np.bincount(np.argmax(P, axis=1), minlength=P.shape[1]).astype(float)


def top_k_renormalize(raw, k: int) -> np.ndarray:
    """Keep the ``k`` largest entries (lowest id wins ties) and rescale them to sum 1.

    Zero entries stay zero, so the support can be smaller than ``k``.
    """
    raw = np.asarray(raw, dtype=float)
    m = raw.size
    if not 1 <= k <= m:
        raise ValueError(f"k must be in [1, {m}], got {k}")
    if np.any(raw < 0) or not np.all(np.isfinite(raw)):
        raise ValueError("weights must be finite and non-negative")
    if raw.sum() <= 0:
        raise ValueError("cannot normalize an all-zero weight vector")
    keep = np.argsort(-raw, kind="stable")[:k]
    w = np.zeros(m)
    w[keep] = raw[keep]
    return w / w.sum()


def combine_scores(
    series,
    weights,
    registry=None,
    score_fn: Optional[Callable[[object, int], np.ndarray]] = None,
) -> np.ndarray:
    """Weighted average of the normalized scores of the detectors with non-zero weight.

    Only those detectors are run. ``score_fn(series, detector_id)`` replaces
    ``registry.detect`` when given.
    """
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or not np.isclose(weights.sum(), 1.0, atol=1e-9):
        raise ValueError("weights must be non-negative and sum to 1")
    if score_fn is None:
        if registry is None:
            raise ValueError("combine_scores needs a registry or a score_fn")
        score_fn = lambda s, j: registry.detect(j, s)  # noqa: E731
    total = None
    for j in np.flatnonzero(weights):
        part = weights[j] * np.asarray(score_fn(series, int(j)), dtype=float)
        total = part if total is None else total + part
    return np.clip(total, 0.0, 1.0)


@dataclass
class InferenceResult:
    """Combined score plus what led to it."""

    scores: np.ndarray
    weights: np.ndarray
    aggregated: np.ndarray
    distributions: np.ndarray
    strategy: str
    k: int
    selection_time: float
    detector_times: dict = field(default_factory=dict)
    series_id: str = ""

    @property
    def selected(self) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.weights)]

    @property
    def detection_time(self) -> float:
        return self.selection_time + sum(self.detector_times.values())

    def diagnostics(self) -> dict:
        return {
            "series_id": self.series_id,
            "strategy": self.strategy,
            "k": self.k,
            "weights": self.weights.tolist(),
            "aggregated": self.aggregated.tolist(),
            "selected": self.selected,
            "distributions": self.distributions.tolist(),
            "timings": {
                "selection_s": self.selection_time,
                "detectors_s": {str(j): t for j, t in self.detector_times.items()},
                "detection_s": self.detection_time,
            },
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.diagnostics(), **kwargs)


def select_weights(distributions, k: int, strategy: str = "average") -> tuple[np.ndarray, np.ndarray]:
    """Aggregate window distributions and truncate to top-k. Returns ``(weights, aggregated)``."""
    if strategy == "average":
        agg = aggregate_average(distributions)
    elif strategy == "vote":
        agg = aggregate_vote(distributions)
    else:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    return top_k_renormalize(agg, k), agg


def run_inference(
    series,
    model,
    k: int = 5,
    strategy: str = "average",
    registry=None,
    score_fn: Optional[Callable[[object, int], np.ndarray]] = None,
    detector_seconds: Optional[Sequence[float]] = None,
) -> InferenceResult:
    """Segment, predict per window, aggregate, keep top-k and combine detector scores.

    Parameters
    ----------
    series : TimeSeries or array-like
    model : fitted selector exposing ``window_`` and ``predict_proba``
    k : int
        Number of detectors to combine.
    strategy : {"average", "vote"}
    registry : DetectorRegistry
    score_fn : callable, optional
        ``score_fn(series, detector_id)`` returning normalized scores, e.g.
        a cache lookup. Defaults to running the registry.
    detector_seconds : sequence of float, optional
        Known runtime of each detector on this series. When given it is
        reported instead of the measured time of ``score_fn`` (useful when
        ``score_fn`` is a cache).
    """
    sid = series.series_id if isinstance(series, TimeSeries) else ""
    values = series.values if isinstance(series, TimeSeries) else np.asarray(series, dtype=float)
    if score_fn is None:
        if registry is None:
            raise ValueError("run_inference needs a registry or a score_fn")
        score_fn = lambda s, j: registry.detect(j, s)  # noqa: E731
    try:
        t0 = time.perf_counter()
        windows = segment_array(values, model.window_)
        dists = np.atleast_2d(model.predict_proba(windows))
        weights, agg = select_weights(dists, k, strategy)
        selection_time = time.perf_counter() - t0

        detector_times = {}
        scores = {}
        for j in np.flatnonzero(weights):
            t1 = time.perf_counter()
            scores[int(j)] = score_fn(series, int(j))
            elapsed = time.perf_counter() - t1
            detector_times[int(j)] = float(detector_seconds[j]) if detector_seconds is not None else elapsed
        combined = combine_scores(series, weights, score_fn=lambda _s, j: scores[j])
    except ValueError as exc:
        raise ValueError(f"inference failed on series {sid or '<array>'}: {exc}") from exc
    return InferenceResult(combined, weights, agg, dists, strategy, k, selection_time, detector_times, sid)
