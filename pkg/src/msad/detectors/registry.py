"""The ordered set of detectors that a selector chooses from."""

from __future__ import annotations

import hashlib
import json
from typing import Sequence

import numpy as np
from sklearn.base import clone

from ..core import TimeSeries
from .base import BaseDetector
from .density import LOF, NormA, PCADetector
from .iforest import IForest, IForest1
from .matrix_profile import MatrixProfile
from .pointwise import HBOS, POLY

DEFAULT_SEED = 42


class DetectorRegistry:
    """Immutable, ordered collection of named detectors.

    The position of a detector is its id: class labels of the selectors and
    columns of weight vectors refer to it.
    """

    def __init__(self, detectors: Sequence[tuple[str, BaseDetector]]):
        names = [name for name, _ in detectors]
        if len(names) < 2:
            raise ValueError("a registry needs at least two detectors")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate detector names in {names}")
        self._detectors = tuple((name, clone(det)) for name, det in detectors)

    def __len__(self):
        return len(self._detectors)

    def __iter__(self):
        return iter(self._detectors)

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self._detectors]

    def index(self, name: str) -> int:
        return self.names.index(name)

    def get(self, detector_id: int) -> BaseDetector:
        """A fresh, unfitted copy of the detector at ``detector_id``."""
        return clone(self._detectors[detector_id][1])

    def detect(self, detector_id: int, series) -> np.ndarray:
        """Normalized score sequence of one detector on one series."""
        name = self._detectors[detector_id][0]
        try:
            return self.get(detector_id).score_series(series)
        except ValueError as exc:
            sid = series.series_id if isinstance(series, TimeSeries) else "<array>"
            raise ValueError(f"detector {name} failed on series {sid}: {exc}") from exc

    def config(self) -> list[dict]:
        return [
            {"name": name, "class": type(det).__name__, "params": det.get_params()}
            for name, det in self._detectors
        ]

    def detector_config_hash(self, detector_id: int) -> str:
        blob = json.dumps(self.config()[detector_id], sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def fingerprint(self) -> str:
        blob = json.dumps(self.config(), sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def default_registry(window="auto", seed: int = DEFAULT_SEED) -> DetectorRegistry:
    """The eight unsupervised detectors with their default settings."""
    return DetectorRegistry(
        [
            ("IForest", IForest(window=window, random_state=seed)),
            ("IForest1", IForest1(random_state=seed)),
            ("LOF", LOF(window=window)),
            ("MP", MatrixProfile(window=window)),
            ("NormA", NormA(window=window, random_state=seed)),
            ("PCA", PCADetector(window=window)),
            ("HBOS", HBOS()),
            ("POLY", POLY(window=window)),
        ]
    )
