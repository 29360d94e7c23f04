"""Isolation forest on subsequences (IForest) and on single points (IForest1)."""

from __future__ import annotations

import numpy as np
from sklearn.utils import check_random_state

from ..core import align_score, sliding_windows
from .base import BaseDetector

EULER_GAMMA = 0.5772156649015329


def average_path_length(n):
    """Expected path length of an unsuccessful BST search over ``n`` points."""
    n = np.asarray(n, dtype=float)
    out = np.zeros_like(n)
    big = n > 2
    out[n == 2] = 1.0
    m = n[big]
    out[big] = 2.0 * (np.log(m - 1.0) + EULER_GAMMA) - 2.0 * (m - 1.0) / m
    return out


class _Tree:
    """Flat array representation of one isolation tree."""

    __slots__ = ("feature", "threshold", "left", "right", "size", "depth")

    def __init__(self, X, rng, height_limit):
        feature, threshold, left, right, size, depth = [], [], [], [], [], []

        def new_node(d, s):
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            size.append(s)
            depth.append(d)
            return len(feature) - 1

        root = new_node(0, len(X))
        stack = [(root, np.arange(len(X)))]
        while stack:
            node, idx = stack.pop()
            d = depth[node]
            if idx.size <= 1 or d >= height_limit:
                continue
            sub = X[idx]
            lo, hi = sub.min(axis=0), sub.max(axis=0)
            usable = np.flatnonzero(hi > lo)
            if usable.size == 0:
                continue
            q = usable[rng.randint(usable.size)]
            p = rng.uniform(lo[q], hi[q])
            go_left = sub[:, q] < p
            feature[node] = q
            threshold[node] = p
            li, ri = idx[go_left], idx[~go_left]
            left[node] = new_node(d + 1, li.size)
            right[node] = new_node(d + 1, ri.size)
            stack.append((left[node], li))
            stack.append((right[node], ri))

        self.feature = np.array(feature)
        self.threshold = np.array(threshold)
        self.left = np.array(left)
        self.right = np.array(right)
        self.size = np.array(size)
        self.depth = np.array(depth)

    def path_length(self, X):
        node = np.zeros(len(X), dtype=int)
        active = self.feature[node] >= 0
        while active.any():
            rows = np.flatnonzero(active)
            cur = node[rows]
            f = self.feature[cur]
            go_left = X[rows, f] < self.threshold[cur]
            node[rows] = np.where(go_left, self.left[cur], self.right[cur])
            active[rows] = self.feature[node[rows]] >= 0
        return self.depth[node] + average_path_length(self.size[node])


class IsolationForest:
    """Plain isolation forest over the rows of ``X``.

    Scores are ``2 ** (-E[h(x)] / c(psi))`` where ``psi`` is the subsample
    size. Kept separate from the detector wrappers so that tests can inspect
    and duplicate ``trees_``.
    """

    def __init__(self, n_estimators=100, max_samples=256, random_state=None):
        self.n_estimators = n_estimators
        self.max_samples = max_samples
        self.random_state = random_state

    def fit(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        rng = check_random_state(self.random_state)
        psi = min(self.max_samples, len(X))
        self.psi_ = psi
        height_limit = int(np.ceil(np.log2(max(psi, 2))))
        self.trees_ = []
        for _ in range(self.n_estimators):
            rows = rng.choice(len(X), psi, replace=False)
            self.trees_.append(_Tree(X[rows], rng, height_limit))
        return self

    def mean_path_length(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        total = np.zeros(len(X))
        for tree in self.trees_:
            total += tree.path_length(X)
        return total / len(self.trees_)

    def score_samples(self, X):
        c = average_path_length(self.psi_)
        if c == 0:
            return np.full(len(X), 0.5)
        return 2.0 ** (-self.mean_path_length(X) / c)


class IForest(BaseDetector):
    """Isolation forest over the series' subsequences of length ``window``."""

    def __init__(self, window="auto", n_estimators=100, max_samples=256, random_state=42):
        self.window = window
        self.n_estimators = n_estimators
        self.max_samples = max_samples
        self.random_state = random_state

    def _raw_scores(self, x, window):
        subs = sliding_windows(x, window)[: x.size - window]
        forest = IsolationForest(self.n_estimators, self.max_samples, self.random_state)
        self.forest_ = forest.fit(subs)
        return align_score(forest.score_samples(subs), window)


class IForest1(BaseDetector):
    """Isolation forest where every point is an individual sample."""

    needs_window = False

    def __init__(self, n_estimators=100, max_samples=256, random_state=42):
        self.n_estimators = n_estimators
        self.max_samples = max_samples
        self.random_state = random_state

    def _raw_scores(self, x, window):
        forest = IsolationForest(self.n_estimators, self.max_samples, self.random_state)
        self.forest_ = forest.fit(x[:, None])
        return forest.score_samples(x[:, None])
