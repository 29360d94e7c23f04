"""Series-level train/val/test assignment for both evaluation protocols."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..core import TimeSeries
from ..selectors import split_series
from .io import ConfigError

SPLIT_MODES = ("in_distribution", "leave_one_dataset_out")


@dataclass
class Fold:
    name: str
    assignment: dict  # series_id -> "train" | "val" | "test"

    def ids(self, tag: str) -> list:
        return [sid for sid, t in self.assignment.items() if t == tag]


def check_fold(fold: Fold) -> None:
    """Every series has exactly one tag and no split is empty where required."""
    tags = set(fold.assignment.values())
    if not tags <= {"train", "val", "test"}:
        raise ValueError(f"fold {fold.name}: unknown split tags {tags}")
    if not fold.ids("train"):
        raise ConfigError(f"fold {fold.name}: empty training split")
    if not fold.ids("test"):
        raise ConfigError(f"fold {fold.name}: empty test split")


def split_corpus(
    corpus: Sequence[TimeSeries],
    mode: str = "in_distribution",
    seed: int = 0,
    test_ratio: float = 0.3,
    val_ratio: float = 0.3,
) -> list[Fold]:
    """Folds for the requested protocol.

    ``in_distribution`` gives one fold: ``test_ratio`` of the series for
    test, ``val_ratio`` of the rest for validation. ``leave_one_dataset_out``
    gives one fold per dataset, tested on that dataset and trained on the
    others (``val_ratio`` of them held out for validation).
    """
    ids = [s.series_id for s in corpus]
    if mode == "in_distribution":
        folds = [Fold("in_distribution", split_series(ids, test_ratio, val_ratio, seed))]
    elif mode == "leave_one_dataset_out":
        datasets = sorted({s.dataset_id for s in corpus})
        if len(datasets) < 2:
            raise ConfigError("leave-one-dataset-out needs at least two datasets")
        folds = []
        for d in datasets:
            held = [s.series_id for s in corpus if s.dataset_id == d]
            rest = [s.series_id for s in corpus if s.dataset_id != d]
            assignment = split_series(rest, 0.0, val_ratio, seed)
            assignment.update({sid: "test" for sid in held})
            folds.append(Fold(f"ood-{d}", assignment))
    else:
        raise ConfigError(f"unknown split mode {mode!r}; expected one of {SPLIT_MODES}")
    for fold in folds:
        check_fold(fold)
    return folds
