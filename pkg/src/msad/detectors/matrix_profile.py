"""Self-join matrix profile (STOMP) and the MP detector."""

from __future__ import annotations

import numpy as np

from ..core import align_score, sliding_windows, znormalize
from .base import BaseDetector


def _moments(x, m):
    subs = sliding_windows(x, m)
    mu = subs.mean(axis=1)
    sd = np.sqrt(np.maximum(np.mean((subs - mu[:, None]) ** 2, axis=1), 0.0))
    scale = np.maximum(np.abs(subs).max(axis=1), 1.0)
    const = sd <= 1e-12 * scale
    return mu, sd, const


def matrix_profile(x, m, exclusion=None):
    """Z-normalized nearest-neighbour distance of every length-``m`` subsequence.

    Dot products are updated row by row (STOMP recurrence), then the distance
    to the chosen neighbour is recomputed directly from the z-normalized
    subsequences to avoid cancellation error when the match is close.

    Parameters
    ----------
    x : ndarray of shape (n,)
    m : int
        Subsequence length.
    exclusion : int, optional
        Matches with ``|i - j| <= exclusion`` are trivial and ignored.
        Defaults to ``m // 2``.

    Returns
    -------
    profile : ndarray of shape (n - m + 1,)
    index : ndarray of shape (n - m + 1,)
        Position of the nearest neighbour, -1 when none exists.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if m < 2 or m > n:
        raise ValueError(f"invalid subsequence length {m} for series of length {n}")
    if exclusion is None:
        exclusion = m // 2
    N = n - m + 1
    mu, sd, const = _moments(x, m)
    safe_sd = np.where(const, 1.0, sd)

    profile = np.full(N, np.inf)
    index = np.full(N, -1, dtype=int)
    first_row = np.convolve(x, x[m - 1::-1], mode="valid") if N > 0 else np.array([])
    qt = first_row.copy()
    positions = np.arange(N)
    const_d2 = float(m)
    for i in range(N):
        if i > 0:
            qt[1:] = qt[:-1] - x[i - 1] * x[: N - 1] + x[i + m - 1] * x[m: m + N - 1]
            qt[0] = first_row[i]
        corr = (qt - m * mu[i] * mu) / (m * safe_sd[i] * safe_sd)
        d2 = 2.0 * m * (1.0 - corr)
        # constant subsequences z-normalize to zeros
        if const[i]:
            d2 = np.where(const, 0.0, const_d2)
        else:
            d2 = np.where(const, const_d2, d2)
        d2[np.abs(positions - i) <= exclusion] = np.inf
        j = int(np.argmin(d2))
        if np.isfinite(d2[j]):
            index[i] = j
    subs = sliding_windows(x, m)
    ok = index >= 0
    if ok.any():
        zi = znormalize(subs[ok])
        zj = znormalize(subs[index[ok]])
        profile[ok] = np.sqrt(np.sum((zi - zj) ** 2, axis=1))
    return profile, index


class MatrixProfile(BaseDetector):
    """Discord detector: the score of a subsequence is its matrix profile value."""

    def __init__(self, window="auto", exclusion=None):
        self.window = window
        self.exclusion = exclusion

    def _raw_scores(self, x, window):
        if window < 2:
            raise ValueError("MatrixProfile: window must be at least 2")
        profile, _ = matrix_profile(x, window, self.exclusion)
        profile = profile[: x.size - window]
        finite = np.isfinite(profile)
        if not finite.all():
            # no admissible neighbour: treat as the most isolated subsequence
            fill = profile[finite].max() if finite.any() else 0.0
            profile = np.where(finite, profile, fill)
        return align_score(profile, window)
