"""Accuracy measures, baselines (AvgEns, Oracle family) and stage timing."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from .core import TimeSeries

MEASURES = ("auc_pr", "vus_pr")


def _check_labels(score, labels):
    score = np.asarray(score, dtype=float).ravel()
    labels = np.asarray(labels).ravel()
    if score.shape != labels.shape:
        raise ValueError(f"score has {score.size} points, labels have {labels.size}")
    if np.isnan(score).any():
        raise ValueError("score contains NaN")
    labels = labels.astype(float)
    if labels.sum() <= 0:
        raise ValueError("undefined AUC-PR: labels contain no anomaly")
    return score, labels


def _average_precision(score, hard, soft):
    """Step-wise area under the PR curve.

    Thresholds are the distinct score values, highest first. Recall counts
    ``hard`` label mass, precision counts ``soft`` label mass; with
    ``soft == hard`` this is the usual average precision.
    """
    order = np.argsort(-score, kind="stable")
    s = score[order]
    tp_hard = np.cumsum(hard[order])
    tp_soft = np.cumsum(soft[order])
    # last position of every run of tied scores
    ends = np.flatnonzero(np.append(s[1:] != s[:-1], True))
    recall = tp_hard[ends] / tp_hard[-1]
    precision = tp_soft[ends] / (ends + 1)
    steps = np.diff(np.concatenate([[0.0], recall]))
    return float(np.sum(steps * precision))


def auc_pr(score, labels) -> float:
    """Area under the precision-recall curve of ``score`` against point labels."""
    score, labels = _check_labels(score, labels)
    return _average_precision(score, labels, labels)


def _distance_to_anomaly(labels):
    n = labels.size
    big = n + 1
    left = np.full(n, big, dtype=float)
    right = np.full(n, big, dtype=float)
    last = -big
    for i in range(n):
        if labels[i] > 0:
            last = i
        left[i] = i - last
    last = 2 * big + n
    for i in range(n - 1, -1, -1):
        if labels[i] > 0:
            last = i
        right[i] = last - i
    return np.minimum(left, right)


def buffered_labels(labels, width: int) -> np.ndarray:
    """Labels softened by a linear ramp of ``width`` points around each anomaly.

    A point at distance ``d`` from the nearest anomaly gets
    ``1 - d / (width + 1)`` when ``d <= width`` and 0 beyond.
    """
    labels = np.asarray(labels, dtype=float).ravel()
    if width <= 0:
        return labels.copy()
    dist = _distance_to_anomaly(labels)
    return np.clip(1.0 - dist / (width + 1.0), 0.0, 1.0)


def vus_pr(score, labels, buffer: int = 10) -> float:
    """Volume under the PR surface over buffer widths ``0..buffer``.

    For each width the area under the PR curve is computed with precision
    measured against the ramp-softened labels and recall against the
    original ones; the volume is the mean over widths. With ``buffer=0`` it
    equals :func:`auc_pr`.
    """
    score, labels = _check_labels(score, labels)
    if buffer < 0:
        raise ValueError("buffer must be non-negative")
    dist = _distance_to_anomaly(labels)
    areas = []
    for w in range(buffer + 1):
        soft = labels if w == 0 else np.clip(1.0 - dist / (w + 1.0), 0.0, 1.0)
        areas.append(_average_precision(score, labels, soft))
    return float(np.mean(areas))


def score_metrics(score, labels, buffer: int = 10) -> dict:
    return {"auc_pr": auc_pr(score, labels), "vus_pr": vus_pr(score, labels, buffer)}


@dataclass
class AccuracyMatrix:
    """Per-series, per-detector accuracy values.

    Attributes
    ----------
    series_ids : list of str
    detectors : list of str
        Detector names in registry order.
    auc_pr, vus_pr : ndarray of shape (n_series, n_detectors)
    """

    series_ids: list
    detectors: list
    auc_pr: np.ndarray
    vus_pr: np.ndarray

    def __post_init__(self):
        self.auc_pr = np.asarray(self.auc_pr, dtype=float)
        self.vus_pr = np.asarray(self.vus_pr, dtype=float)
        shape = (len(self.series_ids), len(self.detectors))
        for name in MEASURES:
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")
        if len(set(self.series_ids)) != len(self.series_ids):
            raise ValueError("duplicate series ids in accuracy matrix")

    def values(self, measure: str = "auc_pr") -> np.ndarray:
        if measure not in MEASURES:
            raise ValueError(f"unknown measure {measure!r}")
        return getattr(self, measure)

    def row(self, series_id: str) -> int:
        return self.series_ids.index(series_id)

    def subset(self, series_ids: Sequence[str]) -> "AccuracyMatrix":
        rows = [self.row(s) for s in series_ids]
        return AccuracyMatrix(list(series_ids), list(self.detectors), self.auc_pr[rows], self.vus_pr[rows])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["series_id", "detector", "auc_pr", "vus_pr"])
            for i, sid in enumerate(self.series_ids):
                for j, det in enumerate(self.detectors):
                    writer.writerow([sid, det, repr(float(self.auc_pr[i, j])), repr(float(self.vus_pr[i, j]))])

    @classmethod
    def from_csv(cls, path) -> "AccuracyMatrix":
        series, detectors, cells = [], [], {}
        with open(path, newline="") as fh:
            for rec in csv.DictReader(fh):
                sid, det = rec["series_id"], rec["detector"]
                if sid not in cells:
                    series.append(sid)
                    cells[sid] = {}
                if det not in detectors:
                    detectors.append(det)
                cells[sid][det] = (float(rec["auc_pr"]), float(rec["vus_pr"]))
        auc = np.empty((len(series), len(detectors)))
        vus = np.empty_like(auc)
        for i, sid in enumerate(series):
            missing = set(detectors) - set(cells[sid])
            if missing:
                raise ValueError(f"accuracy matrix incomplete for series {sid}: {sorted(missing)}")
            for j, det in enumerate(detectors):
                auc[i, j], vus[i, j] = cells[sid][det]
        return cls(series, detectors, auc, vus)


def avg_ens(series, registry=None, scores: Optional[Sequence[np.ndarray]] = None) -> np.ndarray:
    """Pointwise mean of all detectors' normalized scores.

    Pass precomputed normalized ``scores`` (one array per detector) to avoid
    running the registry.
    """
    if scores is None:
        if registry is None:
            raise ValueError("avg_ens needs a registry or precomputed scores")
        scores = [registry.detect(j, series) for j in range(len(registry))]
    stacked = np.vstack([np.asarray(s, dtype=float) for s in scores])
    return stacked.mean(axis=0)


def _ranked(values):
    """Detector indices sorted from best to worst, ties to the lower index."""
    return np.argsort(-np.asarray(values, dtype=float), axis=-1, kind="stable")


def oracle(values) -> Union[int, np.ndarray]:
    """Most accurate detector per series (lowest index on ties).

    ``values`` is one row of accuracies or a matrix with one row per series.
    """
    values = np.asarray(values, dtype=float)
    best = _ranked(values)[..., 0]
    return int(best) if values.ndim == 1 else best


def oracle_kj(values, kappa: float, fallback: Union[int, str] = 2, seed: int = 0) -> np.ndarray:
    """Hypothetical selector with classification accuracy ``kappa``.

    A seeded random subset of ``floor(kappa * n_series)`` series receives
    its best detector; every other series receives its ``fallback``-th best
    detector (1-based), or for ``fallback="random"`` a uniformly drawn
    detector other than its best.

    The misclassified set depends only on ``kappa``, ``seed`` and the number
    of series, so curves for different ``fallback`` share it.
    """
    values = np.asarray(values, dtype=float)
    n, m = values.shape
    if not 0.0 <= kappa <= 1.0:
        raise ValueError("kappa must lie in [0, 1]")
    ranked = _ranked(values)
    rng = np.random.default_rng(seed)
    correct = np.zeros(n, dtype=bool)
    correct[rng.permutation(n)[: int(np.floor(kappa * n + 1e-9))]] = True
    chosen = ranked[:, 0].copy()
    wrong = np.flatnonzero(~correct)
    if fallback == "random" or fallback == "R":
        if m < 2:
            raise ValueError("random fallback needs at least two detectors")
        picks = rng.integers(1, m, size=wrong.size)
        chosen[wrong] = ranked[wrong, picks]
    else:
        j = int(fallback)
        if not 1 <= j <= m:
            raise ValueError(f"fallback rank must be in [1, {m}]")
        chosen[wrong] = ranked[wrong, j - 1]
    return chosen


def selection_accuracy(values, chosen) -> np.ndarray:
    """Per-series accuracy of the detector picked for each series."""
    values = np.asarray(values, dtype=float)
    chosen = np.asarray(chosen, dtype=int)
    return values[np.arange(len(values)), chosen]


def measure_times(stages: Mapping[str, Callable[[], object]]) -> tuple[dict, dict]:
    """Run each stage in order and time it with a monotonic clock.

    Returns ``(seconds, results)``, both keyed by stage name.
    """
    seconds, results = {}, {}
    for name, fn in stages.items():
        t0 = time.perf_counter()
        results[name] = fn()
        seconds[name] = time.perf_counter() - t0
    return seconds, results


def build_accuracy_matrix(corpus: Sequence[TimeSeries], registry, buffer: int = 10, score_fn=None) -> AccuracyMatrix:
    """Evaluate every detector on every series.

    ``score_fn(series, detector_id)`` returns normalized scores; it defaults
    to running the registry and can be swapped for a cache.
    """
    if score_fn is None:
        score_fn = lambda s, j: registry.detect(j, s)  # noqa: E731
    m = len(registry)
    auc = np.empty((len(corpus), m))
    vus = np.empty_like(auc)
    for i, series in enumerate(corpus):
        if series.labels is None:
            raise ValueError(f"series {series.series_id} has no labels")
        for j in range(m):
            s = score_fn(series, j)
            auc[i, j] = auc_pr(s, series.labels)
            vus[i, j] = vus_pr(s, series.labels, buffer)
    return AccuracyMatrix([s.series_id for s in corpus], registry.names, auc, vus)
