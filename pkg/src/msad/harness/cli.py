"""``msad`` command line: generate, score, train, evaluate, report, benchmark.

Exit codes: 0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ..combine import STRATEGIES
from ..selectors import SELECTOR_KINDS, attribute_labels
from ..synthetic import generate_synthetic
from .benchmark import (
    ExperimentConfig,
    evaluate,
    load_evaluation,
    load_experiment_corpus,
    load_folds,
    load_models,
    make_registry,
    run_benchmark,
    save_evaluation,
    save_folds,
    score_corpus,
    train_models,
)
from .cache import ScoreCache
from .io import ConfigError, DataError, save_corpus
from .report import write_report
from .splits import SPLIT_MODES, split_corpus

EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 2, 3


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _choice_list(choices):
    def parse(text):
        items = [t for t in text.split(",") if t]
        bad = [t for t in items if t not in choices]
        if bad:
            raise argparse.ArgumentTypeError(f"invalid choice(s) {bad}; expected {list(choices)}")
        return items

    return parse


def _add_common(p, seed_required=True):
    p.add_argument("--seed", type=int, required=seed_required, help="master seed (mandatory)")
    p.add_argument("--out", default="msad-results", help="output directory")
    p.add_argument("--data", help="corpus directory (one sub-directory per dataset)")
    p.add_argument("--config", help="JSON experiment config; flags override it")
    p.add_argument("--cache-dir", help="detector score cache directory")


def _add_experiment(p):
    p.add_argument("--selector", type=_choice_list(SELECTOR_KINDS), help="comma-separated selector kinds")
    p.add_argument("--window", type=_int_list, help="comma-separated window lengths")
    p.add_argument("--k", type=_int_list, help="comma-separated k values")
    p.add_argument("--strategy", type=_choice_list(STRATEGIES), help="average, vote or both")
    p.add_argument("--mode", choices=SPLIT_MODES, help="evaluation protocol")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="msad", description="Detector selection benchmark")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic corpus")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="corpus directory to write")
    p.add_argument("--domains", type=int, default=4)
    p.add_argument("--per-domain", type=int, default=20)
    p.add_argument("--length", type=int, default=2048)
    p.add_argument("--anomalies", type=int, default=2)

    p = sub.add_parser("score", help="run every detector and store the accuracy matrix")
    _add_common(p)

    for name, text in (
        ("train", "train selectors on every fold"),
        ("evaluate", "evaluate trained selectors and baselines"),
        ("benchmark", "score, train, evaluate and report in one go"),
    ):
        p = sub.add_parser(name, help=text)
        _add_common(p)
        _add_experiment(p)

    p = sub.add_parser("report", help="rebuild aggregates and plot tables from results")
    p.add_argument("--out", default="msad-results")
    return parser


def make_config(args) -> ExperimentConfig:
    data = {}
    if getattr(args, "config", None):
        data = json.loads(Path(args.config).read_text()) if Path(args.config).exists() else None
        if data is None:
            raise ConfigError(f"config file {args.config} not found")
    overrides = {
        "seed": args.seed,
        "out_dir": args.out,
        "cache_dir": getattr(args, "cache_dir", None),
        "selectors": getattr(args, "selector", None),
        "windows": getattr(args, "window", None),
        "k_values": getattr(args, "k", None),
        "strategies": getattr(args, "strategy", None),
        "mode": getattr(args, "mode", None),
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    if getattr(args, "data", None):
        data["corpus"] = {"directory": args.data}
    return ExperimentConfig.from_dict(data)


def _labels(matrix, config):
    return dict(zip(matrix.series_ids, attribute_labels(matrix, config.measure).tolist()))


def run(args) -> int:
    if args.command == "generate":
        try:
            corpus = generate_synthetic(
                args.domains, args.per_domain, args.length, n_anomalies=args.anomalies, seed=args.seed
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        paths = save_corpus(corpus, args.out)
        print(f"wrote {len(paths)} series to {args.out}")
        return EXIT_OK

    if args.command == "report":
        out = Path(args.out)
        if not (out / "results.csv").exists():
            raise ConfigError(f"no results in {out}; run 'evaluate' first")
        report = load_evaluation(out)
        names = json.loads((out / "accuracy_matrix.meta.json").read_text())["detectors"]
        write_report(report, out, names)
        print(f"report written to {out}")
        return EXIT_OK

    config = make_config(args)
    if args.command == "benchmark":
        report = run_benchmark(config)
        print(f"{len(report.rows)} result rows written to {config.out_dir}")
        return EXIT_OK

    corpus = load_experiment_corpus(config)
    registry = make_registry(config)
    cache = ScoreCache(registry, config.cache_dir)
    matrix = score_corpus(corpus, registry, cache, config.out_dir, config.buffer)
    out = Path(config.out_dir)
    if args.command == "score":
        print(f"accuracy matrix for {len(corpus)} series written to {out}")
        return EXIT_OK

    if args.command == "train":
        folds = split_corpus(corpus, config.mode, config.seed, config.test_ratio, config.val_ratio)
        save_folds(folds, out / "folds.json")
        _, seconds = train_models(
            corpus, _labels(matrix, config), folds, config.selectors, config.windows,
            registry, config.seed, out, config.selector_params,
        )
        (out / "training.json").write_text(json.dumps(seconds, indent=2, sort_keys=True) + "\n")
        print(f"trained {len(seconds)} selectors into {out / 'models'}")
        return EXIT_OK

    # evaluate
    if not (out / "folds.json").exists():
        raise ConfigError(f"no folds in {out}; run 'train' first")
    folds = load_folds(out / "folds.json")
    models = load_models(out, folds, registry)
    models = {
        key: mdl for key, mdl in models.items()
        if key[1] in config.selectors and (getattr(args, "window", None) is None or key[2] in config.windows)
    }
    if not models:
        raise ConfigError("no trained selectors match the requested --selector/--window")
    config.selectors = sorted({key[1] for key in models})
    config.windows = sorted({key[2] for key in models})
    report = evaluate(
        corpus, matrix, folds, models, registry, cache, config.k_values, config.strategies,
        config.buffer, config.measure, config.oracle_kappas, config.oracle_fallbacks, config.seed,
    )
    report.config = config.fingerprint_dict()
    training = out / "training.json"
    report.training_time_s = json.loads(training.read_text()) if training.exists() else {}
    save_evaluation(report, out)
    write_report(report, out, registry.names)
    print(f"{len(report.rows)} result rows written to {out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return run(args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConfigError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
