"""Label attribution and window datasets for training selectors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from ..core import TimeSeries, segment_array
from ..evaluation import AccuracyMatrix, oracle

SPLITS = ("train", "val", "test")


def attribute_labels(matrix, measure: str = "auc_pr") -> np.ndarray:
    """Most accurate detector id per series; ties go to the lower id."""
    values = matrix.values(measure) if isinstance(matrix, AccuracyMatrix) else np.asarray(matrix, dtype=float)
    return np.atleast_1d(oracle(np.atleast_2d(values)))


def split_series(
    series_ids: Sequence[str],
    test_ratio: float = 0.3,
    val_ratio: float = 0.3,
    seed: int = 0,
) -> dict:
    """Series-level split into train / val / test.

    ``floor(test_ratio * n)`` series go to test; ``floor(val_ratio * rest)``
    of the remaining ones go to validation.
    """
    ids = list(series_ids)
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate series ids")
    rng = np.random.default_rng(seed)
    order = [ids[i] for i in rng.permutation(len(ids))]
    n_test = int(np.floor(test_ratio * len(ids) + 1e-9))
    rest = order[n_test:]
    n_val = int(np.floor(val_ratio * len(rest) + 1e-9))
    assignment = {sid: "test" for sid in order[:n_test]}
    assignment.update({sid: "val" for sid in rest[:n_val]})
    assignment.update({sid: "train" for sid in rest[n_val:]})
    return assignment


@dataclass
class WindowDataset:
    """Fixed-length windows with the label and split of their source series.

    Attributes
    ----------
    X : ndarray of shape (n_windows, window)
    y : ndarray of shape (n_windows,)
        Detector id of the source series.
    series_ids : ndarray of shape (n_windows,)
    split : ndarray of shape (n_windows,)
        One of ``"train"``, ``"val"``, ``"test"``.
    """

    X: np.ndarray
    y: np.ndarray
    series_ids: np.ndarray
    split: np.ndarray

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=int)
        self.series_ids = np.asarray(self.series_ids, dtype=object)
        self.split = np.asarray(self.split, dtype=object)
        n = len(self.X)
        if self.X.ndim != 2:
            raise ValueError("windows must share one length")
        if not (len(self.y) == len(self.series_ids) == len(self.split) == n):
            raise ValueError("window dataset columns have different lengths")
        bad = set(self.split) - set(SPLITS)
        if bad:
            raise ValueError(f"unknown split tags {sorted(bad)}")
        for sid in np.unique(self.series_ids):
            if len(set(self.split[self.series_ids == sid])) > 1:
                raise ValueError(f"series {sid} has windows in more than one split")

    @property
    def window(self) -> int:
        return self.X.shape[1]

    def part(self, name: str) -> "WindowDataset":
        mask = self.split == name
        return WindowDataset(self.X[mask], self.y[mask], self.series_ids[mask], self.split[mask])

    def series_labels(self) -> dict:
        return {sid: int(y) for sid, y in zip(self.series_ids, self.y)}


def build_window_dataset(
    corpus: Sequence[TimeSeries],
    labels: Mapping[str, int],
    window: int,
    assignment: Optional[Mapping[str, str]] = None,
    test_ratio: float = 0.3,
    val_ratio: float = 0.3,
    seed: int = 0,
) -> WindowDataset:
    """Segment every series and attach its label and split to each window.

    Without an explicit ``assignment`` the corpus is split with
    :func:`split_series`. Series missing from ``assignment`` are left out.
    """
    if assignment is None:
        assignment = split_series([s.series_id for s in corpus], test_ratio, val_ratio, seed)
    X, y, sids, split = [], [], [], []
    for series in corpus:
        tag = assignment.get(series.series_id)
        if tag is None:
            continue
        wins = segment_array(series.values, window)
        X.append(wins)
        y.extend([labels[series.series_id]] * len(wins))
        sids.extend([series.series_id] * len(wins))
        split.extend([tag] * len(wins))
    if not X:
        raise ValueError("no series selected for the window dataset")
    return WindowDataset(np.vstack(X), np.array(y), np.array(sids, dtype=object), np.array(split, dtype=object))
