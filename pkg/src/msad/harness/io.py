"""Reading and writing series in the two-column CSV format (value, label)."""

from __future__ import annotations

import csv
import hashlib
from pathlib import Path
from typing import Iterable

import numpy as np

from ..core import TimeSeries


class ConfigError(ValueError):
    """Invalid experiment configuration or stale cache (exit code 2)."""


class DataError(ValueError):
    """Malformed input data (exit code 3)."""


def load_series(path) -> TimeSeries:
    """Parse one series file.

    Each row holds a value and a 0/1 label. A single non-numeric header row
    is tolerated. ``dataset_id`` is the parent directory name and
    ``series_id`` the file stem.
    """
    path = Path(path)
    values, labels = [], []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 columns, found {len(row)}")
            try:
                value = float(row[0])
            except ValueError:
                if lineno == 1 and not values:
                    continue  # header
                raise DataError(f"{path}:{lineno}: non-numeric value {row[0]!r}") from None
            try:
                label = float(row[1])
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric label {row[1]!r}") from None
            if label not in (0.0, 1.0):
                raise DataError(f"{path}:{lineno}: label must be 0 or 1, got {row[1]!r}")
            if not np.isfinite(value):
                raise DataError(f"{path}:{lineno}: value is not finite")
            values.append(value)
            labels.append(int(label))
    if not values:
        raise DataError(f"{path}: no data rows")
    return TimeSeries(np.array(values), np.array(labels), series_id=path.stem, dataset_id=path.parent.name)


def write_series(series: TimeSeries, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    labels = series.labels if series.labels is not None else np.zeros(series.n, dtype=int)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for v, lab in zip(series.values, labels):
            writer.writerow([repr(float(v)), int(lab)])


def load_corpus(root) -> list[TimeSeries]:
    """All ``*.csv`` files below ``root``, sorted by path.

    Each sub-directory is one dataset.
    """
    root = Path(root)
    if not root.is_dir():
        raise DataError(f"{root} is not a directory")
    files = sorted(p for p in root.rglob("*.csv") if p.is_file())
    if not files:
        raise DataError(f"no CSV series found under {root}")
    corpus = [load_series(p) for p in files]
    ids = [s.series_id for s in corpus]
    if len(set(ids)) != len(ids):
        raise DataError("series file names must be unique across datasets")
    return corpus


def save_corpus(corpus: Iterable[TimeSeries], root) -> list[Path]:
    root = Path(root)
    paths = []
    for series in corpus:
        path = root / (series.dataset_id or "default") / f"{series.series_id}.csv"
        write_series(series, path)
        paths.append(path)
    return paths


def series_hash(series: TimeSeries) -> str:
    return hashlib.sha256(np.ascontiguousarray(series.values).tobytes()).hexdigest()[:24]


def corpus_hash(corpus: Iterable[TimeSeries]) -> str:
    h = hashlib.sha256()
    for s in sorted(corpus, key=lambda s: s.series_id):
        h.update(s.series_id.encode())
        h.update(series_hash(s).encode())
        if s.labels is not None:
            h.update(np.ascontiguousarray(s.labels).tobytes())
    return h.hexdigest()[:24]
