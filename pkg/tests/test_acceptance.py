"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is
printed in the pytest terminal summary.

Run alone with ``python3 -m pytest tests/test_acceptance.py``.
"""

import itertools
import time

import numpy as np
import pytest

from msad.combine import run_inference
from msad.core import align_score, segment, window_starts, znormalize
from msad.detectors import matrix_profile
from msad.evaluation import (
    auc_pr,
    avg_ens,
    measure_times,
    oracle,
    oracle_kj,
    selection_accuracy,
    vus_pr,
)
from msad.harness import ExperimentConfig, ScoreCache, run_benchmark
from msad.harness.benchmark import load_experiment_corpus, load_folds, load_models, make_registry, score_corpus
from msad.selectors.conv import init_params, loss_and_grad
from msad.synthetic import generate_synthetic

SEED = 0
CORPUS = {"n_domains": 4, "series_per_domain": 16, "length": 2048}


def make_config(out, cache):
    return ExperimentConfig(
        seed=SEED,
        out_dir=str(out),
        corpus={"synthetic": CORPUS},
        windows=[64, 128],
        k_values=[1, 5],
        strategies=["average", "vote"],
        cache_dir=str(cache),
    )


@pytest.fixture(scope="module")
def bench(tmp_path_factory):
    root = tmp_path_factory.mktemp("acceptance")
    config = make_config(root / "run1", root / "cache")
    corpus = load_experiment_corpus(config)
    registry = make_registry(config)
    cache = ScoreCache(registry, config.cache_dir)
    t0 = time.perf_counter()
    matrix = score_corpus(corpus, registry, cache, config.out_dir, config.buffer)
    oracle(matrix.auc_pr)
    matrix_seconds = time.perf_counter() - t0
    report = run_benchmark(config)
    folds = load_folds(root / "run1" / "folds.json")
    models = load_models(root / "run1", folds, registry)
    return dict(
        root=root, config=config, corpus=corpus, registry=registry, cache=cache, matrix=matrix,
        matrix_seconds=matrix_seconds, report=report, folds=folds, models=models,
    )


def test_oracle_dominance(bench, criterion):
    matrix = bench["matrix"]
    assert len(matrix.series_ids) >= 60 and len({s.dataset_id for s in bench["corpus"]}) >= 3
    auc = matrix.auc_pr
    per_series = selection_accuracy(auc, oracle(auc))
    dominates = bool(np.all(per_series[:, None] >= auc))
    gap = per_series.mean() - auc.mean(axis=0).max()
    criterion(
        "Oracle dominance",
        dominates and gap >= 0.02 and bench["matrix_seconds"] < 600,
        f"per-series dominance={dominates}, Oracle AUC-PR {per_series.mean():.4f} vs best detector "
        f"{auc.mean(axis=0).max():.4f} (gap {gap:.4f} >= 0.02), matrix built in {bench['matrix_seconds']:.1f}s",
    )


def test_oracle_kj_lattice(bench, criterion):
    values = bench["matrix"].vus_pr
    m = values.shape[1]
    ok = np.array_equal(oracle_kj(values, 1.0, 2, SEED), oracle(values))
    ok &= np.array_equal(selection_accuracy(values, oracle_kj(values, 0.0, m, SEED)), values.min(axis=1))
    for kappa in np.linspace(0, 1, 11):
        aggs = [selection_accuracy(values, oracle_kj(values, kappa, j, SEED)).mean() for j in range(2, m + 1)]
        ok &= all(b <= a for a, b in zip(aggs, aggs[1:]))
    criterion("Oracle_{k,j} lattice", ok, "non-increasing in j for 11 kappas; Oracle_{1,1}=Oracle; Oracle_{0,m}=min")


class UniformSelector:
    def __init__(self, window, m):
        self.window_, self.m = window, m

    def predict_proba(self, X):
        return np.full((len(X), self.m), 1.0 / self.m)


def test_avg_ens_equivalence(bench, criterion):
    cache, m = bench["cache"], len(bench["registry"])
    worst = 0.0
    for series in bench["corpus"]:
        res = run_inference(series, UniformSelector(64, m), k=m, score_fn=cache.scores)
        ens = avg_ens(series, scores=[cache.scores(series, j) for j in range(m)])
        worst = max(worst, float(np.max(np.abs(res.scores - ens))))
    criterion("AvgEns equivalence", worst <= 1e-12, f"max |diff| {worst:.2e} over {len(bench['corpus'])} series")


def brute_auc_pr(score, labels):
    area, prev = 0.0, 0.0
    for t in sorted(set(score.tolist()), reverse=True):
        pred = score >= t
        recall = labels[pred].sum() / labels.sum()
        area += (recall - prev) * labels[pred].sum() / pred.sum()
        prev = recall
    return area


def test_metric_oracles(criterion):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for trial in range(1000):
        n = int(rng.integers(2, 33))
        labels = (rng.random(n) < 0.3).astype(int)
        labels[rng.integers(n)] = 1
        score = rng.integers(0, 5, n) / 4.0 if trial % 2 else rng.random(n)
        worst = max(worst, abs(auc_pr(score, labels) - brute_auc_pr(score, labels)))
    equal = True
    n_toy = 0
    for start, length in itertools.product(range(16), (1, 2, 4)):
        if start + length > 16:
            continue
        labels = np.zeros(16, int)
        labels[start:start + length] = 1
        for score in (rng.random(16), rng.integers(0, 3, 16).astype(float)):
            equal &= vus_pr(score, labels, 0) == auc_pr(score, labels)
            n_toy += 1
    criterion(
        "Metric oracles",
        worst <= 1e-9 and equal,
        f"auc_pr max error {worst:.1e} on 1000 instances; vus_pr(buffer 0)==auc_pr on {n_toy} toy cases: {equal}",
    )


def test_segmentation_alignment(criterion):
    ok, cases = True, 0
    for n in range(1, 65):
        for length in range(1, n + 1):
            wins = segment(np.arange(n, dtype=float), length)
            covered = np.zeros(n, int)
            for w in wins:
                covered[w.start:w.start + w.length] += 1
            ok &= len(wins) == -(-n // length) and all(w.length == length for w in wins)
            ok &= covered.min() == 1 and wins[0].start == 0 and wins[-1].start + length == n
            ok &= [w.start for w in wins] == window_starts(n, length)
            if length < n:
                ok &= align_score(np.arange(n - length, dtype=float), length).size == n
            cases += 1
    criterion("Segmentation/alignment", ok, f"{cases} (n, l) pairs checked")


def brute_profile(x, m):
    z = znormalize(np.lib.stride_tricks.sliding_window_view(x, m))
    d = np.sqrt(((z[:, None, :] - z[None, :, :]) ** 2).sum(axis=2))
    idx = np.arange(len(z))
    d[np.abs(idx[:, None] - idx[None, :]) <= m // 2] = np.inf
    return d.min(axis=1)


def test_matrix_profile(criterion):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for n, m in [(64, 8), (200, 20), (333, 16), (512, 32), (512, 64)]:
        x = np.sin(np.arange(n) / 4.0) + 0.2 * rng.standard_normal(n)
        worst = max(worst, float(np.max(np.abs(matrix_profile(x, m)[0] - brute_profile(x, m)))))
    criterion("Matrix profile correctness", worst <= 1e-9, f"max |diff| {worst:.1e} for n <= 512")


def test_directional_selector(bench, criterion):
    agg = bench["report"].aggregates()["methods"]
    names = bench["registry"].names
    best_det = max(agg[d]["vus_pr_mean"] for d in names)
    ens = agg["AvgEns"]["vus_pr_mean"]
    winners = sorted(
        (v["vus_pr_mean"], m) for m, v in agg.items()
        if m.endswith(("1", "5")) and m not in names and m not in ("AvgEns", "Oracle")
        and v["vus_pr_mean"] > max(best_det, ens)
    )
    top = f"{winners[-1][1]} {winners[-1][0]:.4f}" if winners else "none"
    criterion(
        "Directional selector result",
        bool(winners),
        f"{len(winners)} selector configs beat best detector {best_det:.4f} and AvgEns {ens:.4f}; top: {top}",
    )


def test_k_behavior(bench, criterion):
    report, cache = bench["report"], bench["cache"]
    kind, window = report.best_selector()
    v1 = report.aggregate(f"{kind}-{window}-Av1")
    v5 = report.aggregate(f"{kind}-{window}-Av5")
    by_id = {s.series_id: s for s in bench["corpus"]}
    within_k, fewer, total = True, 0, 0
    for fold in bench["folds"]:
        for (fname, _, _), model in bench["models"].items():
            if fname != fold.name:
                continue
            for sid in fold.ids("test"):
                for k in (1, 5):
                    runs = {}
                    for strategy in ("average", "vote"):
                        res = run_inference(by_id[sid], model, k, strategy, score_fn=cache.scores)
                        runs[strategy] = len(res.detector_times)
                        within_k &= runs[strategy] <= k
                    fewer += runs["vote"] <= runs["average"]
                    total += 1
    share = fewer / total
    criterion(
        "k-behavior",
        v5 >= v1 and within_k and share >= 0.9,
        f"best selector {kind}-{window}: VUS-PR Av5 {v5:.4f} vs Av1 {v1:.4f}; executed <= k: {within_k}; "
        f"vote <= average executed on {share:.1%} of {total} (series, model, k) cases",
    )


def test_timing_sanity(bench, criterion):
    registry = bench["registry"]
    kind, window = bench["report"].best_selector()
    model = bench["models"][(bench["folds"][0].name, kind, window)]
    long_series = generate_synthetic(4, 2, 4096, seed=SEED + 1)
    slower = []
    for series in long_series:
        seconds, _ = measure_times({name: (lambda j=j: registry.detect(j, series)) for j, name in enumerate(registry.names)})
        ens_time = sum(seconds.values())
        res = run_inference(series, model, 1, "average", registry=registry)
        if not res.detection_time < ens_time:
            slower.append((series.series_id, res.detection_time, ens_time))

    rng = np.random.default_rng(SEED)
    params = {k: v + 0.1 * rng.normal(size=v.shape) for k, v in init_params(3, 4, rng).items()}
    X, y, w = rng.normal(size=(3, 16)), np.array([0, 1, 2]), np.ones(3)
    _, grads = loss_and_grad(params, X, y, w)
    worst = 0.0
    for name, p in params.items():
        for idx in np.ndindex(p.shape):
            orig = p[idx]
            p[idx] = orig + 1e-6
            up, _ = loss_and_grad(params, X, y, w)
            p[idx] = orig - 1e-6
            down, _ = loss_and_grad(params, X, y, w)
            p[idx] = orig
            num = (up - down) / 2e-6
            worst = max(worst, abs(grads[name][idx] - num) / max(1.0, abs(num)))
    criterion(
        "Timing sanity",
        not slower and worst <= 1e-4,
        f"k=1 detection faster than AvgEns on {len(long_series) - len(slower)}/{len(long_series)} series "
        f"of n=4096; conv_lite gradient max rel. error {worst:.1e}",
    )


def test_determinism(bench, criterion):
    root = bench["root"]
    run_benchmark(make_config(root / "run2", root / "cache"))
    a = (root / "run1" / "aggregates.json").read_bytes()
    b = (root / "run2" / "aggregates.json").read_bytes()
    criterion("Determinism", a == b, f"aggregates.json identical across reruns: {a == b} ({len(a)} bytes)")
