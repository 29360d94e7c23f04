"""Selector models: window -> probability distribution over detectors."""

from __future__ import annotations

import pickle
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.ensemble import RandomForestClassifier
from sklearn.naive_bayes import GaussianNB
from sklearn.neighbors import KNeighborsClassifier
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler
from sklearn.tree import DecisionTreeClassifier
from sklearn.utils.validation import check_array, check_is_fitted

from ..core import znormalize
from ..features import MinimalFeatures
from .conv import ConvLiteClassifier
from .dataset import WindowDataset
from .rocket import RocketLiteClassifier

FEATURE_KINDS = ("knn", "decision_tree", "random_forest", "gaussian_nb")
RAW_KINDS = ("rocket_lite", "conv_lite")
SELECTOR_KINDS = FEATURE_KINDS + RAW_KINDS

MODEL_FORMAT = "msad-selector"
MODEL_VERSION = 1


def _make_classifier(kind, params, seed, n_train):
    params = dict(params or {})
    if kind == "knn":
        params.setdefault("n_neighbors", 5)
        params.setdefault("weights", "distance")
        params["n_neighbors"] = min(params["n_neighbors"], n_train)
        return KNeighborsClassifier(**params)
    if kind == "decision_tree":
        params.setdefault("max_depth", 12)
        params.setdefault("class_weight", "balanced")
        return DecisionTreeClassifier(random_state=seed, **params)
    if kind == "random_forest":
        params.setdefault("n_estimators", 100)
        params.setdefault("class_weight", "balanced")
        return RandomForestClassifier(random_state=seed, **params)
    if kind == "gaussian_nb":
        params.setdefault("var_smoothing", 1e-9)
        return GaussianNB(**params)
    if kind == "rocket_lite":
        return RocketLiteClassifier(random_state=seed, **params)
    if kind == "conv_lite":
        return ConvLiteClassifier(random_state=seed, **params)
    raise ValueError(f"unknown selector kind {kind!r}; expected one of {SELECTOR_KINDS}")


class SelectorModel(ClassifierMixin, BaseEstimator):
    """Classifier over fixed-length windows whose classes are detector ids.

    Feature-based kinds see the nine minimal statistics of each raw window
    (standardized); ``rocket_lite`` and ``conv_lite`` see z-normalized
    windows.

    Parameters
    ----------
    kind : str, default="knn"
        One of ``SELECTOR_KINDS``.
    n_detectors : int, default=8
        Size of the detector registry; ``predict_proba`` always returns this
        many columns, zero for detectors absent from training.
    params : dict, optional
        Hyperparameters forwarded to the underlying classifier.
    random_state : int, default=0
    """

    def __init__(self, kind="knn", n_detectors=8, params=None, random_state=0):
        self.kind = kind
        self.n_detectors = n_detectors
        self.params = params
        self.random_state = random_state

    def _prepare(self, X):
        return znormalize(X) if self.kind in RAW_KINDS else X

    def fit(self, X, y, X_val=None, y_val=None):
        X = check_array(X)
        y = np.asarray(y, dtype=int)
        if len(X) == 0:
            raise ValueError("empty training set")
        if y.min() < 0 or y.max() >= self.n_detectors:
            raise ValueError(f"labels must be detector ids in [0, {self.n_detectors})")
        if np.unique(y).size < 2:
            raise ValueError("training set has a single class; need at least two detectors as labels")
        self.window_ = X.shape[1]
        clf = _make_classifier(self.kind, self.params, self.random_state, len(X))
        if self.kind in FEATURE_KINDS:
            self.estimator_ = make_pipeline(MinimalFeatures(), StandardScaler(), clf)
            self.estimator_.fit(X, y)
        elif self.kind == "conv_lite" and X_val is not None and len(X_val):
            X_val = check_array(X_val)
            self.estimator_ = clf.fit(self._prepare(X), y, self._prepare(X_val), np.asarray(y_val, dtype=int))
        else:
            self.estimator_ = clf.fit(self._prepare(X), y)
        self.classes_ = np.arange(self.n_detectors)
        return self

    def predict_proba(self, X):
        """Distribution over all detectors for each window (or a single window)."""
        check_is_fitted(self, "estimator_")
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = check_array(np.atleast_2d(X))
        if X.shape[1] != self.window_:
            raise ValueError(f"selector expects windows of length {self.window_}, got {X.shape[1]}")
        raw = self.estimator_.predict_proba(self._prepare(X))
        proba = np.zeros((len(X), self.n_detectors))
        proba[:, self.estimator_.classes_.astype(int)] = raw
        proba = np.clip(proba, 0.0, None)
        total = proba.sum(axis=1, keepdims=True)
        proba = np.where(total > 0, proba / np.where(total > 0, total, 1.0), 1.0 / self.n_detectors)
        return proba[0] if single else proba

    def predict(self, X):
        proba = np.atleast_2d(self.predict_proba(X))
        return np.argmax(proba, axis=1)


def fit_selector(
    kind: str,
    dataset: WindowDataset,
    params: Optional[dict] = None,
    seed: int = 0,
    registry=None,
    n_detectors: Optional[int] = None,
) -> SelectorModel:
    """Train a selector on the train split of ``dataset`` (val split used for early stopping)."""
    train, val = dataset.part("train"), dataset.part("val")
    if len(train.X) == 0:
        raise ValueError("train split is empty")
    if n_detectors is None:
        n_detectors = len(registry) if registry is not None else int(dataset.y.max()) + 1
    model = SelectorModel(kind, n_detectors, params, seed)
    model.fit(train.X, train.y, val.X if len(val.X) else None, val.y if len(val.X) else None)
    if registry is not None:
        model.registry_fingerprint_ = registry.fingerprint()
        model.detector_names_ = registry.names
    return model


def vote_per_series(model, dataset: WindowDataset) -> dict:
    """Top-1 detector per series from window votes (lowest id wins ties)."""
    preds = model.predict(dataset.X)
    out = {}
    for sid in dict.fromkeys(dataset.series_ids):
        votes = np.bincount(preds[dataset.series_ids == sid], minlength=model.n_detectors)
        out[sid] = int(np.argmax(votes))
    return out


def classification_accuracy(model, dataset: WindowDataset) -> float:
    """Fraction of series whose voted detector equals their label."""
    if len(dataset.X) == 0:
        raise ValueError("empty evaluation set")
    labels = dataset.series_labels()
    chosen = vote_per_series(model, dataset)
    return float(np.mean([chosen[sid] == labels[sid] for sid in chosen]))


def save_model(model: SelectorModel, path) -> None:
    check_is_fitted(model, "estimator_")
    blob = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "kind": model.kind,
        "window": model.window_,
        "registry_fingerprint": getattr(model, "registry_fingerprint_", None),
        "detectors": getattr(model, "detector_names_", None),
        "model": model,
    }
    with open(path, "wb") as fh:
        pickle.dump(blob, fh, protocol=pickle.HIGHEST_PROTOCOL)


def load_model(path, registry=None) -> SelectorModel:
    """Load a saved selector, refusing one trained for a different registry."""
    with open(path, "rb") as fh:
        blob = pickle.load(fh)
    if not isinstance(blob, dict) or blob.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path} is not a saved selector")
    if blob.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported selector format version {blob.get('version')}")
    if registry is not None and blob["registry_fingerprint"] != registry.fingerprint():
        raise ValueError(
            f"selector in {path} was trained for registry {blob['registry_fingerprint']}, "
            f"current registry is {registry.fingerprint()}"
        )
    return blob["model"]
