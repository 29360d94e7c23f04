"""Benchmark harness: corpus I/O, score cache, splits, orchestration, reports, CLI."""

from .benchmark import (
    ExperimentConfig,
    evaluate,
    load_evaluation,
    oracle_curves,
    run_benchmark,
    save_evaluation,
    score_corpus,
    train_models,
)
from .cache import CACHE_ENV, ScoreCache, default_cache_dir
from .io import ConfigError, DataError, corpus_hash, load_corpus, load_series, save_corpus, series_hash, write_series
from .report import EvaluationReport, ResultRow, emit_plot_data, method_name, parse_method_name, read_results, write_report, write_results
from .splits import SPLIT_MODES, Fold, check_fold, split_corpus

__all__ = [
    "CACHE_ENV",
    "ConfigError",
    "DataError",
    "EvaluationReport",
    "ExperimentConfig",
    "Fold",
    "ResultRow",
    "SPLIT_MODES",
    "ScoreCache",
    "check_fold",
    "corpus_hash",
    "default_cache_dir",
    "emit_plot_data",
    "evaluate",
    "load_corpus",
    "load_evaluation",
    "load_series",
    "method_name",
    "oracle_curves",
    "parse_method_name",
    "read_results",
    "run_benchmark",
    "save_corpus",
    "save_evaluation",
    "score_corpus",
    "series_hash",
    "split_corpus",
    "train_models",
    "write_report",
    "write_results",
    "write_series",
]
