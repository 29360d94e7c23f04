"""End-to-end estimator: train a selector on a labelled corpus, score new series."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .combine import run_inference, select_weights
from .core import segment_array
from .detectors import default_registry
from .evaluation import build_accuracy_matrix
from .selectors import attribute_labels, build_window_dataset, fit_selector, split_series


class MSAD(BaseEstimator):
    """Model selection for anomaly detection.

    ``fit`` labels every training series with its most accurate detector,
    cuts the series into windows and trains a selector on them.
    ``decision_function`` then runs only the top-``k`` detectors predicted
    for a new series and returns their weighted score.

    Parameters
    ----------
    selector : str, default="knn"
        Selector kind, see ``msad.selectors.SELECTOR_KINDS``.
    window : int, default=64
        Window length fed to the selector.
    k : int, default=5
        Number of detectors to combine.
    strategy : {"average", "vote"}, default="average"
    registry : DetectorRegistry, optional
        Defaults to the eight unsupervised detectors.
    selector_params : dict, optional
    measure : {"auc_pr", "vus_pr"}, default="auc_pr"
        Measure used to pick the label of each training series.
    val_ratio : float, default=0.3
        Share of training series held out for early stopping.
    random_state : int, default=0
    """

    def __init__(
        self,
        selector="knn",
        window=64,
        k=5,
        strategy="average",
        registry=None,
        selector_params=None,
        measure="auc_pr",
        val_ratio=0.3,
        random_state=0,
    ):
        self.selector = selector
        self.window = window
        self.k = k
        self.strategy = strategy
        self.registry = registry
        self.selector_params = selector_params
        self.measure = measure
        self.val_ratio = val_ratio
        self.random_state = random_state

    def fit(self, X, y=None, accuracy=None):
        """Fit on a list of labelled ``TimeSeries``.

        ``y`` gives the detector id of each series directly; otherwise it is
        derived from ``accuracy`` (an ``AccuracyMatrix``), computed on the
        fly if missing.
        """
        corpus = list(X)
        self.registry_ = self.registry if self.registry is not None else default_registry()
        ids = [s.series_id for s in corpus]
        if y is None:
            if accuracy is None:
                accuracy = build_accuracy_matrix(corpus, self.registry_)
            labels = attribute_labels(accuracy.subset(ids), self.measure)
        else:
            labels = np.asarray(y, dtype=int)
        self.labels_ = dict(zip(ids, labels.tolist()))
        assignment = split_series(ids, test_ratio=0.0, val_ratio=self.val_ratio, seed=self.random_state)
        dataset = build_window_dataset(corpus, self.labels_, self.window, assignment)
        self.selector_ = fit_selector(
            self.selector, dataset, self.selector_params, self.random_state, registry=self.registry_
        )
        return self

    def infer(self, series):
        """Full inference result (scores, weights, timings) for one series."""
        check_is_fitted(self, "selector_")
        return run_inference(series, self.selector_, self.k, self.strategy, self.registry_)

    def predict_weights(self, series) -> np.ndarray:
        check_is_fitted(self, "selector_")
        values = getattr(series, "values", series)
        dists = self.selector_.predict_proba(segment_array(values, self.selector_.window_))
        return select_weights(dists, self.k, self.strategy)[0]

    def decision_function(self, series) -> np.ndarray:
        """Combined anomaly score in [0, 1], one value per point."""
        return self.infer(series).scores

    def predict(self, series) -> int:
        """Id of the detector with the largest weight."""
        return int(np.argmax(self.predict_weights(series)))
