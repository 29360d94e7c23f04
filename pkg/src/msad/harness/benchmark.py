"""Experiment orchestration: score -> train -> evaluate -> report."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..combine import STRATEGIES, run_inference
from ..core import TimeSeries
from ..detectors import DetectorRegistry, default_registry
from ..evaluation import (
    AccuracyMatrix,
    auc_pr,
    avg_ens,
    build_accuracy_matrix,
    oracle,
    oracle_kj,
    selection_accuracy,
    vus_pr,
)
from ..selectors import (
    SELECTOR_KINDS,
    attribute_labels,
    build_window_dataset,
    fit_selector,
    load_model,
    save_model,
    vote_per_series,
)
from ..synthetic import generate_synthetic
from .cache import ScoreCache
from .io import ConfigError, corpus_hash, load_corpus
from .report import EvaluationReport, ResultRow, method_name, read_results, write_report
from .splits import SPLIT_MODES, Fold, split_corpus

log = logging.getLogger(__name__)

DEFAULT_WINDOWS = (16, 32, 64, 128, 256, 512, 768, 1024)
DEFAULT_KAPPAS = tuple(round(0.1 * i, 1) for i in range(11))
MATRIX_FILE = "accuracy_matrix.csv"
MATRIX_META = "accuracy_matrix.meta.json"


@dataclass
class ExperimentConfig:
    """What to run. ``seed`` is mandatory.

    ``corpus`` is either ``{"synthetic": {...generate_synthetic kwargs}}``
    or ``{"directory": path}``. ``oracle_fallbacks`` entries are ranks
    (ints), ``"R"`` for random, or ``"m"`` for the worst detector.
    """

    seed: int
    out_dir: str = "msad-results"
    corpus: dict = field(default_factory=lambda: {"synthetic": {}})
    registry: dict = field(default_factory=lambda: {"window": "auto", "seed": 42})
    selectors: list = field(default_factory=lambda: list(SELECTOR_KINDS))
    windows: list = field(default_factory=lambda: list(DEFAULT_WINDOWS))
    k_values: list = field(default_factory=lambda: [1, 5])
    strategies: list = field(default_factory=lambda: list(STRATEGIES))
    mode: str = "in_distribution"
    measure: str = "auc_pr"
    buffer: int = 10
    test_ratio: float = 0.3
    val_ratio: float = 0.3
    oracle_kappas: list = field(default_factory=lambda: list(DEFAULT_KAPPAS))
    oracle_fallbacks: list = field(default_factory=lambda: [2, 3, 4, "R", "m"])
    selector_params: dict = field(default_factory=dict)
    cache_dir: Optional[str] = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise ConfigError("seed is mandatory and must be an integer")
        for name in ("selectors", "windows", "k_values", "strategies"):
            if not getattr(self, name):
                raise ConfigError(f"config needs at least one entry in {name}")
        bad = set(self.selectors) - set(SELECTOR_KINDS)
        if bad:
            raise ConfigError(f"unknown selectors {sorted(bad)}")
        bad = set(self.strategies) - set(STRATEGIES)
        if bad:
            raise ConfigError(f"unknown strategies {sorted(bad)}")
        if self.mode not in SPLIT_MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.measure not in ("auc_pr", "vus_pr"):
            raise ConfigError(f"unknown measure {self.measure!r}")
        if any(int(w) < 2 for w in self.windows):
            raise ConfigError("window lengths must be at least 2")
        if any(int(k) < 1 for k in self.k_values):
            raise ConfigError("k values must be positive")
        if set(self.corpus) - {"synthetic", "directory"} or len(self.corpus) != 1:
            raise ConfigError("corpus must be {'synthetic': {...}} or {'directory': path}")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        if "seed" not in data:
            raise ConfigError("seed is mandatory")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    def fingerprint_dict(self) -> dict:
        """Config without output locations, for reproducibility records."""
        d = self.to_dict()
        d.pop("out_dir")
        d.pop("cache_dir")
        return d


def load_experiment_corpus(config: ExperimentConfig) -> list[TimeSeries]:
    if "directory" in config.corpus:
        return load_corpus(config.corpus["directory"])
    params = dict(config.corpus["synthetic"])
    params.setdefault("seed", config.seed)
    return generate_synthetic(**params)


def make_registry(config: ExperimentConfig) -> DetectorRegistry:
    reg = dict(config.registry)
    return default_registry(window=reg.get("window", "auto"), seed=reg.get("seed", 42))


# --------------------------------------------------------------------- score


def score_corpus(corpus, registry, cache: ScoreCache, out_dir, buffer: int = 10) -> AccuracyMatrix:
    """Fill (or reuse) the accuracy matrix stored in ``out_dir``.

    A stored matrix is reused only when its registry fingerprint, corpus
    hash and buffer match; otherwise the run is refused.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = {
        "registry_fingerprint": registry.fingerprint(),
        "corpus_hash": corpus_hash(corpus),
        "buffer": buffer,
        "detectors": registry.names,
    }
    mpath, metapath = out_dir / MATRIX_FILE, out_dir / MATRIX_META
    if mpath.exists():
        stored = json.loads(metapath.read_text()) if metapath.exists() else {}
        if stored != meta:
            raise ConfigError(
                f"{mpath} was computed for a different corpus or detector registry; "
                "delete it or choose another output directory and re-run"
            )
        matrix = AccuracyMatrix.from_csv(mpath)
        if matrix.series_ids != [s.series_id for s in corpus]:
            raise ConfigError(f"{mpath} does not list the corpus series in order; re-run scoring")
        return matrix
    matrix = build_accuracy_matrix(corpus, registry, buffer, score_fn=cache.scores)
    matrix.to_csv(mpath)
    metapath.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return matrix


# --------------------------------------------------------------------- train


def _model_path(out_dir, fold_name, kind, window):
    return Path(out_dir) / "models" / fold_name / f"{kind}-{window}.pkl"


def train_models(corpus, labels, folds, kinds, windows, registry, seed, out_dir=None, selector_params=None):
    """Train every (kind, window) selector on every fold.

    Returns ``{(fold, kind, window): model}`` and training seconds keyed by
    ``"fold/kind-window"``.
    """
    shortest = min(s.n for s in corpus)
    for w in windows:
        if int(w) > shortest:
            raise ConfigError(f"window {w} is longer than the shortest series ({shortest})")
    models, seconds = {}, {}
    selector_params = selector_params or {}
    for fold in folds:
        for window in windows:
            dataset = build_window_dataset(corpus, labels, int(window), fold.assignment)
            leaked = set(dataset.series_ids[dataset.split != "test"]) & set(fold.ids("test"))
            if leaked:
                raise RuntimeError(f"fold {fold.name}: test series {sorted(leaked)[:3]} reached training")
            for kind in kinds:
                t0 = time.perf_counter()
                model = fit_selector(kind, dataset, selector_params.get(kind), seed, registry=registry)
                seconds[f"{fold.name}/{kind}-{window}"] = time.perf_counter() - t0
                models[(fold.name, kind, int(window))] = model
                if out_dir is not None:
                    path = _model_path(out_dir, fold.name, kind, window)
                    path.parent.mkdir(parents=True, exist_ok=True)
                    save_model(model, path)
                log.info("trained %s-%s on %s", kind, window, fold.name)
    return models, seconds


def save_folds(folds, path) -> None:
    Path(path).write_text(json.dumps([asdict(f) for f in folds], indent=2, sort_keys=True) + "\n")


def load_folds(path) -> list[Fold]:
    return [Fold(**d) for d in json.loads(Path(path).read_text())]


def load_models(out_dir, folds, registry) -> dict:
    models = {}
    for fold in folds:
        for path in sorted((Path(out_dir) / "models" / fold.name).glob("*.pkl")):
            kind, window = path.stem.rsplit("-", 1)
            try:
                models[(fold.name, kind, int(window))] = load_model(path, registry)
            except ValueError as exc:
                raise ConfigError(f"{exc}; retrain the selectors") from exc
    if not models:
        raise ConfigError(f"no trained selectors under {out_dir}/models; run 'train' first")
    return models


# ------------------------------------------------------------------ evaluate


def _fallback(fb, m):
    if fb == "m":
        return m
    if fb in ("R", "random"):
        return "random"
    return int(fb)


def oracle_curves(matrix: AccuracyMatrix, kappas, fallbacks, seed) -> list[dict]:
    """Mean accuracy of Oracle_{kappa, j} over the series of ``matrix``."""
    m = len(matrix.detectors)
    rows = []
    for fb in fallbacks:
        j = _fallback(fb, m)
        curve = f"Oracle_k,{'R' if j == 'random' else j}"
        for kappa in kappas:
            chosen = oracle_kj(matrix.vus_pr, float(kappa), j, seed)
            rows.append(
                {
                    "curve": curve,
                    "kappa": float(kappa),
                    "vus_pr": float(selection_accuracy(matrix.vus_pr, chosen).mean()),
                    "auc_pr": float(selection_accuracy(matrix.auc_pr, chosen).mean()),
                }
            )
    return rows


def evaluate(
    corpus,
    matrix: AccuracyMatrix,
    folds,
    models: dict,
    registry,
    cache: ScoreCache,
    k_values,
    strategies,
    buffer: int = 10,
    measure: str = "auc_pr",
    kappas=DEFAULT_KAPPAS,
    fallbacks=(2, 3, 4, "R", "m"),
    seed: int = 0,
) -> EvaluationReport:
    """Score every test series with every selector configuration and baseline."""
    by_id = {s.series_id: s for s in corpus}
    m = len(registry)
    for k in k_values:
        if int(k) > m:
            raise ConfigError(f"k={k} exceeds the number of detectors ({m})")
    labels = dict(zip(matrix.series_ids, attribute_labels(matrix, measure).tolist()))
    rows, classification = [], {}
    tested = []
    for fold in folds:
        test_ids = fold.ids("test")
        tested.extend(test_ids)
        fold_models = sorted((key, mdl) for key, mdl in models.items() if key[0] == fold.name)
        for (_, kind, window), model in fold_models:
            test_set = build_window_dataset([by_id[s] for s in test_ids], labels, window, fold.assignment)
            voted = vote_per_series(model, test_set)
            entry = classification.setdefault(f"{kind}-{window}", {"correct": 0, "total": 0})
            entry["correct"] += int(sum(voted[sid] == labels[sid] for sid in voted))
            entry["total"] += len(voted)
        for sid in test_ids:
            series = by_id[sid]
            seconds = cache.seconds(series)
            for (_, kind, window), model in fold_models:
                for strategy in strategies:
                    for k in k_values:
                        res = run_inference(
                            series, model, int(k), strategy, score_fn=cache.scores, detector_seconds=seconds
                        )
                        rows.append(
                            ResultRow(
                                method_name(kind, window, strategy, int(k)),
                                sid,
                                series.dataset_id,
                                auc_pr(res.scores, series.labels),
                                vus_pr(res.scores, series.labels, buffer),
                                res.selection_time,
                                res.detection_time,
                            )
                        )
    for entry in classification.values():
        entry["accuracy"] = entry["correct"] / entry["total"]

    for sid in tested:
        series = by_id[sid]
        i = matrix.row(sid)
        seconds = cache.seconds(series)
        for j, name in enumerate(registry.names):
            rows.append(
                ResultRow(name, sid, series.dataset_id, float(matrix.auc_pr[i, j]), float(matrix.vus_pr[i, j]), 0.0, seconds[j])
            )
        ens = avg_ens(series, scores=[cache.scores(series, j) for j in range(m)])
        rows.append(
            ResultRow("AvgEns", sid, series.dataset_id, auc_pr(ens, series.labels), vus_pr(ens, series.labels, buffer), 0.0, float(sum(seconds)))
        )
        best = oracle(matrix.values(measure)[i])
        rows.append(
            ResultRow("Oracle", sid, series.dataset_id, float(matrix.auc_pr[i, best]), float(matrix.vus_pr[i, best]), 0.0, seconds[best])
        )

    curves = oracle_curves(matrix.subset(tested), kappas, fallbacks, seed)
    return EvaluationReport(rows, classification, curves, folds=[f.name for f in folds])


def save_evaluation(report: EvaluationReport, out_dir) -> None:
    from .report import write_results

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_results(report.rows, out_dir / "results.csv")
    extra = {
        "classification": report.classification,
        "oracle_curves": report.oracle_curves,
        "folds": report.folds,
        "config": report.config,
        "training_time_s": report.training_time_s,
    }
    (out_dir / "evaluation.json").write_text(json.dumps(extra, indent=2, sort_keys=True) + "\n")


def load_evaluation(out_dir) -> EvaluationReport:
    out_dir = Path(out_dir)
    rows = read_results(out_dir / "results.csv")
    extra = json.loads((out_dir / "evaluation.json").read_text())
    return EvaluationReport(
        rows,
        extra["classification"],
        extra["oracle_curves"],
        extra.get("config", {}),
        extra.get("folds", []),
        extra.get("training_time_s", {}),
    )


# ----------------------------------------------------------------- benchmark


def run_benchmark(config: ExperimentConfig) -> EvaluationReport:
    """Run the whole protocol and write all result files to ``config.out_dir``."""
    out_dir = Path(config.out_dir)
    corpus = load_experiment_corpus(config)
    registry = make_registry(config)
    cache = ScoreCache(registry, config.cache_dir)
    log.info("scoring %d series with %d detectors", len(corpus), len(registry))
    matrix = score_corpus(corpus, registry, cache, out_dir, config.buffer)
    labels = dict(zip(matrix.series_ids, attribute_labels(matrix, config.measure).tolist()))
    folds = split_corpus(corpus, config.mode, config.seed, config.test_ratio, config.val_ratio)
    save_folds(folds, out_dir / "folds.json")
    models, train_seconds = train_models(
        corpus, labels, folds, config.selectors, config.windows, registry, config.seed, out_dir, config.selector_params
    )
    report = evaluate(
        corpus,
        matrix,
        folds,
        models,
        registry,
        cache,
        config.k_values,
        config.strategies,
        config.buffer,
        config.measure,
        config.oracle_kappas,
        config.oracle_fallbacks,
        config.seed,
    )
    report.config = config.fingerprint_dict()
    report.training_time_s = train_seconds
    save_evaluation(report, out_dir)
    write_report(report, out_dir, registry.names)
    return report
