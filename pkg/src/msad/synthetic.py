"""Desk-scale synthetic benchmark with several signal domains.

Each domain has its own base signal and, by default, its own anomaly kind,
so the most accurate detector differs from one domain to the next.
"""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

from .core import TimeSeries

BASE_SIGNALS = ("sine", "sawtooth", "ar1", "random_walk")
ANOMALY_KINDS = ("point", "contextual", "sequence")

# anomaly kind used for each base signal when kind="mixed"
DEFAULT_KIND = {
    "sine": "sequence",
    "sawtooth": "point",
    "ar1": "sequence",
    "random_walk": "contextual",
}


def _base_signal(kind, n, rng):
    t = np.arange(n, dtype=float)
    if kind == "sine":
        period = rng.uniform(40, 80)
        amp = rng.uniform(0.8, 1.5)
        x = amp * np.sin(2 * np.pi * t / period + rng.uniform(0, 2 * np.pi))
        x += rng.normal(0, 0.05 * amp, n)
        return x, period
    if kind == "sawtooth":
        period = rng.uniform(30, 60)
        amp = rng.uniform(1.0, 2.0)
        phase = (t / period + rng.uniform(0, 1)) % 1.0
        x = amp * (2 * phase - 1) + rng.normal(0, 0.1 * amp, n)
        return x, period
    if kind == "ar1":
        phi = rng.uniform(0.5, 0.8)
        eps = rng.normal(0, 1.0, n)
        x = np.empty(n)
        x[0] = eps[0]
        for i in range(1, n):
            x[i] = phi * x[i - 1] + eps[i]
        return x + rng.uniform(-2, 2), None
    if kind == "random_walk":
        steps = rng.normal(0, 0.3, n)
        x = np.cumsum(steps)
        # smooth so that the local level is predictable
        x = np.convolve(x, np.ones(5) / 5, mode="same")
        x[:2], x[-2:] = x[2], x[-3]
        return x, None
    raise ValueError(f"unknown base signal {kind!r}")


def _place(n, seg_len, count, rng, margin):
    """Random non-overlapping segment starts, at least ``margin`` apart."""
    slot = seg_len + margin
    usable = n - 2 * margin - seg_len
    if count == 0:
        return []
    if usable < 0 or count * slot > n - 2 * margin:
        raise ValueError(
            f"cannot place {count} anomalies of length {seg_len} in a series of length {n}"
        )
    # sample gaps then lay out segments left to right
    free = n - 2 * margin - count * slot + margin
    cuts = np.sort(rng.integers(0, free + 1, size=count))
    starts = [int(margin + c + i * slot) for i, c in enumerate(cuts)]
    return starts


def _inject(x, labels, kind, base, period, n_anomalies, rng):
    n = x.size
    scale = np.std(x)
    if kind == "point":
        idx = _place(n, 1, n_anomalies, rng, margin=max(8, n // 64))
        for j in idx:
            x[j] += rng.choice([-1, 1]) * rng.uniform(4, 6) * scale
            labels[j] = 1
    elif kind == "contextual":
        idx = _place(n, 1, n_anomalies, rng, margin=max(8, n // 64))
        lo, hi = np.percentile(x, [5, 95])
        for j in idx:
            # stays within the global range but breaks the local level
            local = x[j]
            target = hi if local - lo < hi - local else lo
            x[j] = target
            labels[j] = 1
    elif kind == "sequence":
        seg = int(round(period)) if period else 64
        seg = max(16, min(seg, n // 8))
        idx = _place(n, seg, n_anomalies, rng, margin=max(2 * seg, n // 32))
        for s in idx:
            if base in ("sine", "sawtooth"):
                # one cycle replaced by noise of comparable amplitude
                x[s:s + seg] = rng.normal(np.mean(x), 0.6 * scale, seg)
            else:
                t = np.arange(seg)
                x[s:s + seg] += 2.5 * scale * np.sin(2 * np.pi * t / 6.0)
            labels[s:s + seg] = 1
    else:
        raise ValueError(f"unknown anomaly kind {kind!r}")


def generate_synthetic(
    n_domains: int = 4,
    series_per_domain: int = 20,
    length: int = 2048,
    anomaly_kind: Union[str, Sequence[str]] = "mixed",
    n_anomalies: int = 2,
    seed: int = 0,
) -> list[TimeSeries]:
    """Generate a labelled multi-domain corpus.

    Parameters
    ----------
    n_domains : int
        Number of domains; domain ``d`` uses base signal
        ``BASE_SIGNALS[d % 4]``.
    series_per_domain : int
    length : int
        Points per series, at least 128.
    anomaly_kind : {"point", "contextual", "sequence", "mixed"} or sequence
        One kind for every domain, one per domain, or ``"mixed"`` for the
        per-signal defaults in ``DEFAULT_KIND``.
    n_anomalies : int
        Anomalies injected per series.
    seed : int

    Returns
    -------
    list of TimeSeries
        Ordered by domain then series index. Fully determined by the
        arguments.
    """
    if length < 128:
        raise ValueError("synthetic series must have length >= 128")
    if n_domains < 1 or series_per_domain < 1:
        raise ValueError("need at least one domain and one series per domain")
    if n_anomalies < 0:
        raise ValueError("anomaly count must be non-negative")
    if isinstance(anomaly_kind, str):
        kinds = [anomaly_kind] * n_domains
    else:
        kinds = list(anomaly_kind)
        if len(kinds) != n_domains:
            raise ValueError("need one anomaly kind per domain")

    root = np.random.SeedSequence(seed)
    corpus = []
    for d, child in enumerate(root.spawn(n_domains)):
        base = BASE_SIGNALS[d % len(BASE_SIGNALS)]
        kind = DEFAULT_KIND[base] if kinds[d] == "mixed" else kinds[d]
        if kind not in ANOMALY_KINDS:
            raise ValueError(f"unknown anomaly kind {kind!r}")
        dataset_id = f"D{d}_{base}"
        for s, sub in enumerate(child.spawn(series_per_domain)):
            rng = np.random.default_rng(sub)
            x, period = _base_signal(base, length, rng)
            labels = np.zeros(length, dtype=np.int8)
            _inject(x, labels, kind, base, period, n_anomalies, rng)
            corpus.append(
                TimeSeries(x, labels, series_id=f"{dataset_id}_{s:03d}", dataset_id=dataset_id)
            )
    return corpus
