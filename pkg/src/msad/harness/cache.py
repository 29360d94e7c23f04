"""On-disk cache of detector scores and their runtimes."""

from __future__ import annotations

import os
import tempfile
import time
from pathlib import Path

import numpy as np

from .io import series_hash

CACHE_ENV = "MSAD_CACHE_DIR"


def default_cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV, Path.home() / ".cache" / "msad"))


class ScoreCache:
    """Normalized detector scores keyed by series content and detector configuration.

    The detector configuration hash covers every hyperparameter, including
    the seed of randomized detectors. Entries are written atomically.
    """

    def __init__(self, registry, root=None):
        self.registry = registry
        self.root = Path(root) if root is not None else default_cache_dir()
        self._config_hash = [registry.detector_config_hash(j) for j in range(len(registry))]
        self._memory = {}

    def _path(self, series, detector_id):
        return self.root / self._config_hash[detector_id] / f"{series_hash(series)}.npz"

    def get(self, series, detector_id: int) -> tuple[np.ndarray, float]:
        """Scores and detector runtime in seconds, computing them on a miss."""
        path = self._path(series, detector_id)
        key = str(path)
        if key in self._memory:
            return self._memory[key]
        if path.exists():
            with np.load(path) as data:
                entry = (data["scores"], float(data["seconds"]))
        else:
            t0 = time.perf_counter()
            scores = self.registry.detect(detector_id, series)
            entry = (scores, time.perf_counter() - t0)
            self._write(path, entry)
        self._memory[key] = entry
        return entry

    def scores(self, series, detector_id: int) -> np.ndarray:
        return self.get(series, detector_id)[0]

    def seconds(self, series) -> list[float]:
        return [self.get(series, j)[1] for j in range(len(self.registry))]

    @staticmethod
    def _write(path, entry):
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                np.savez(fh, scores=entry[0], seconds=np.float64(entry[1]))
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
