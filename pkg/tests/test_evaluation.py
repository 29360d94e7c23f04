import itertools
import time

import numpy as np
import pytest

from msad.evaluation import (
    AccuracyMatrix,
    auc_pr,
    avg_ens,
    buffered_labels,
    measure_times,
    oracle,
    oracle_kj,
    selection_accuracy,
    vus_pr,
)


def brute_auc_pr(score, labels, soft=None):
    soft = labels if soft is None else soft
    total = labels.sum()
    area, prev_recall = 0.0, 0.0
    for t in sorted(set(score.tolist()), reverse=True):
        pred = [i for i in range(len(score)) if score[i] >= t]
        recall = sum(labels[i] for i in pred) / total
        precision = sum(soft[i] for i in pred) / len(pred)
        area += (recall - prev_recall) * precision
        prev_recall = recall
    return area


def brute_soft_labels(labels, w):
    n = len(labels)
    anomalies = [i for i in range(n) if labels[i]]
    out = np.zeros(n)
    for i in range(n):
        d = min(abs(i - a) for a in anomalies)
        out[i] = max(0.0, 1 - d / (w + 1)) if d <= w else 0.0
    return out


def brute_vus_pr(score, labels, buffer):
    return np.mean([brute_auc_pr(score, labels, brute_soft_labels(labels, w)) for w in range(buffer + 1)])


def test_auc_pr_matches_brute_force_on_random_instances():
    rng = np.random.default_rng(0)
    for trial in range(1000):
        n = int(rng.integers(2, 33))
        labels = (rng.random(n) < rng.uniform(0.05, 0.6)).astype(int)
        if labels.sum() == 0:
            labels[rng.integers(n)] = 1
        # quantized scores make ties common
        score = rng.integers(0, 6, n) / 5.0 if trial % 2 else rng.random(n)
        assert abs(auc_pr(score, labels) - brute_auc_pr(score, labels)) < 1e-9


def test_auc_pr_examples():
    labels = np.array([0, 0, 1, 1, 0, 0, 0, 0])
    assert auc_pr(labels.astype(float), labels) == 1.0
    assert auc_pr(1.0 - labels, labels) == pytest.approx(labels.mean())
    with pytest.raises(ValueError, match="undefined AUC-PR"):
        auc_pr(np.ones(4), np.zeros(4))


def toy_corpus():
    """Every placement of one or two anomaly segments in a series of 12 points."""
    rng = np.random.default_rng(1)
    out = []
    n = 12
    for start, length in itertools.product(range(n), (1, 2, 3)):
        if start + length > n:
            continue
        labels = np.zeros(n, int)
        labels[start:start + length] = 1
        out.append((rng.random(n), labels))
        out.append((rng.integers(0, 3, n).astype(float), labels))
    return out


def test_vus_pr_buffer_zero_equals_auc_pr_on_toy_corpus():
    for score, labels in toy_corpus():
        assert vus_pr(score, labels, buffer=0) == auc_pr(score, labels)


def test_vus_pr_matches_direct_summation_oracle():
    rng = np.random.default_rng(2)
    labels = np.zeros(32, int)
    labels[12:16] = 1
    for _ in range(50):
        score = rng.random(32)
        assert abs(vus_pr(score, labels, 2) - brute_vus_pr(score, labels, 2)) < 1e-9
    for score, labels in toy_corpus():
        assert abs(vus_pr(score, labels, 3) - brute_vus_pr(score, labels, 3)) < 1e-9


def test_vus_pr_perfect_score_and_peaked_monotonicity():
    labels = np.zeros(60, int)
    labels[20:25] = 1
    assert vus_pr(labels.astype(float), labels, 10) == 1.0
    # a score peaked inside the anomaly with slowly decaying shoulders
    score = np.maximum(0, 1 - np.abs(np.arange(60) - 22) / 12)
    values = [vus_pr(score, labels, b) for b in range(8)]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


def test_buffered_labels_ramp():
    labels = np.zeros(9)
    labels[4] = 1
    assert np.allclose(buffered_labels(labels, 2), [0, 0, 1 / 3, 2 / 3, 1, 2 / 3, 1 / 3, 0, 0])
    assert np.array_equal(buffered_labels(labels, 0), labels)


def test_avg_ens_examples():
    assert np.array_equal(avg_ens(None, scores=[np.array([0.0, 1.0]), np.array([1.0, 0.0])]), [0.5, 0.5])
    s = np.array([0.2, 0.9, 0.1])
    assert np.array_equal(avg_ens(None, scores=[s]), s)


def test_oracle_examples():
    assert oracle([0.3, 0.7]) == 1
    assert oracle([0.4, 0.4, 0.4]) == 0
    assert oracle(np.array([[0.1, 0.2], [0.9, 0.9]])).tolist() == [1, 0]


def test_oracle_kj_lattice():
    rng = np.random.default_rng(3)
    values = rng.random((40, 6))
    m = values.shape[1]
    best = selection_accuracy(values, oracle(values))
    assert np.array_equal(oracle_kj(values, 1.0, 2), oracle(values))
    assert np.array_equal(selection_accuracy(values, oracle_kj(values, 0.0, m)), values.min(axis=1))
    for kappa in np.linspace(0, 1, 11):
        aggs = [selection_accuracy(values, oracle_kj(values, kappa, j, seed=5)).mean() for j in range(2, m + 1)]
        assert all(b <= a for a, b in zip(aggs, aggs[1:]))
        rand = oracle_kj(values, kappa, "random", seed=5)
        wrong = rand != oracle(values)
        assert wrong.sum() == 40 - int(np.floor(kappa * 40 + 1e-9))
    for j in range(2, m + 1):
        assert np.all(selection_accuracy(values, oracle_kj(values, 0.3, j)) <= best)
    with pytest.raises(ValueError):
        oracle_kj(values, 1.5)
    with pytest.raises(ValueError):
        oracle_kj(values, 0.5, m + 1)


def test_measure_times():
    seconds, results = measure_times({"noop": lambda: None, "sleep": lambda: time.sleep(0.02) or 7})
    assert 0 <= seconds["noop"] < 0.01
    assert seconds["sleep"] >= 0.015
    assert results["sleep"] == 7


def test_accuracy_matrix_csv_round_trip(tmp_path):
    rng = np.random.default_rng(4)
    m = AccuracyMatrix(["a", "b", "c"], ["X", "Y"], rng.random((3, 2)), rng.random((3, 2)))
    m.to_csv(tmp_path / "m.csv")
    back = AccuracyMatrix.from_csv(tmp_path / "m.csv")
    assert back.series_ids == m.series_ids and back.detectors == m.detectors
    assert np.array_equal(back.auc_pr, m.auc_pr) and np.array_equal(back.vus_pr, m.vus_pr)
    sub = m.subset(["c", "a"])
    assert np.array_equal(sub.auc_pr, m.auc_pr[[2, 0]])
