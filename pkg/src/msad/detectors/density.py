"""Proximity, clustering and projection based detectors: LOF, NormA, PCA."""

from __future__ import annotations

import warnings

import numpy as np
from sklearn.cluster import KMeans
from sklearn.neighbors import LocalOutlierFactor
from sklearn.utils import check_random_state

from ..core import align_score, sliding_windows, znormalize
from .base import BaseDetector


class LOF(BaseDetector):
    """Local outlier factor of z-normalized subsequences seen as points in R^window."""

    def __init__(self, window="auto", n_neighbors=20):
        self.window = window
        self.n_neighbors = n_neighbors

    def _raw_scores(self, x, window):
        subs = znormalize(sliding_windows(x, window)[: x.size - window])
        k = min(self.n_neighbors, len(subs) - 1)
        if k < 1:
            return np.full(x.size, 0.5)
        lof = LocalOutlierFactor(n_neighbors=k, algorithm="brute")
        with warnings.catch_warnings():
            # repeated subsequences (flat stretches) are expected here
            warnings.filterwarnings("ignore", message="Duplicate values", category=UserWarning)
            lof.fit(subs)
        return align_score(-lof.negative_outlier_factor_, window)


class NormA(BaseDetector):
    """Clustering-based normal model, simplified.

    Sampled z-normalized subsequences are clustered with k-means. A
    subsequence scores ``min_c dist(x, c) * w_c`` where clusters are ranked
    by size in ascending order and ``w_c = 1 / rank``, so distances to large
    (normal) clusters are discounted the most. This weighting is a stand-in
    for the original NormA normal-model weights.
    """

    def __init__(self, window="auto", n_clusters=8, n_samples=1000, random_state=42):
        self.window = window
        self.n_clusters = n_clusters
        self.n_samples = n_samples
        self.random_state = random_state

    def _raw_scores(self, x, window):
        subs = znormalize(sliding_windows(x, window)[: x.size - window])
        rng = check_random_state(self.random_state)
        n_sub = len(subs)
        if n_sub > self.n_samples:
            rows = np.sort(rng.choice(n_sub, self.n_samples, replace=False))
            sample = subs[rows]
        else:
            sample = subs
        k = min(self.n_clusters, len(np.unique(sample, axis=0)))
        if k < 2:
            return np.full(x.size, 0.5)
        km = KMeans(n_clusters=k, n_init=3, random_state=rng.randint(2**31 - 1))
        assign = km.fit_predict(sample)
        sizes = np.bincount(assign, minlength=k)
        # stable ascending order: ties keep the lower cluster index first
        ranks = np.empty(k)
        ranks[np.argsort(sizes, kind="stable")] = np.arange(1, k + 1)
        weights = 1.0 / ranks
        centers = km.cluster_centers_
        d2 = (
            np.sum(subs**2, axis=1)[:, None]
            - 2.0 * subs @ centers.T
            + np.sum(centers**2, axis=1)[None, :]
        )
        dist = np.sqrt(np.maximum(d2, 0.0))
        self.cluster_weights_ = weights
        return align_score(np.min(dist * weights[None, :], axis=1), window)


class PCADetector(BaseDetector):
    """Distance of each subsequence to the hyperplane of its top principal components.

    ``n_components=None`` uses ``max(1, window // 10)``.
    """

    def __init__(self, window="auto", n_components=None):
        self.window = window
        self.n_components = n_components

    def _raw_scores(self, x, window):
        subs = sliding_windows(x, window)[: x.size - window]
        centered = subs - subs.mean(axis=0)
        p = self.n_components if self.n_components is not None else max(1, window // 10)
        p = min(int(p), window)
        _, _, vt = np.linalg.svd(centered, full_matrices=False)
        basis = vt[:p]
        residual = centered - (centered @ basis.T) @ basis
        return align_score(np.linalg.norm(residual, axis=1), window)
