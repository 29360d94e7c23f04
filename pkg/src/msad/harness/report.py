"""Result rows, aggregates and plot-ready tables."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

DETECTOR_BASELINES = ("AvgEns", "Oracle")


def method_name(kind: str, window: int, strategy: str, k: int) -> str:
    """``knn-1024-V5`` style name: kind, window, V (vote) or Av (average), k."""
    tag = {"vote": "V", "average": "Av"}[strategy]
    return f"{kind}-{window}-{tag}{k}"


def parse_method_name(name: str):
    """Inverse of :func:`method_name`; ``None`` for detectors and baselines."""
    parts = name.rsplit("-", 2)
    if len(parts) != 3 or not parts[1].isdigit():
        return None
    kind, window, tail = parts
    if tail.startswith("Av"):
        strategy, k = "average", tail[2:]
    elif tail.startswith("V"):
        strategy, k = "vote", tail[1:]
    else:
        return None
    if not k.isdigit():
        return None
    return kind, int(window), strategy, int(k)


@dataclass
class ResultRow:
    method: str
    series_id: str
    dataset_id: str
    auc_pr: float
    vus_pr: float
    selection_time_s: float
    detection_time_s: float


ROW_FIELDS = [f.name for f in fields(ResultRow)]
_FLOAT_FIELDS = {"auc_pr", "vus_pr", "selection_time_s", "detection_time_s"}


def write_results(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ROW_FIELDS)
        for row in rows:
            writer.writerow([repr(float(v)) if k in _FLOAT_FIELDS else v for k, v in asdict(row).items()])


def read_results(path) -> list[ResultRow]:
    with open(path, newline="") as fh:
        return [
            ResultRow(**{k: float(v) if k in _FLOAT_FIELDS else v for k, v in rec.items()})
            for rec in csv.DictReader(fh)
        ]


@dataclass
class EvaluationReport:
    """Everything a benchmark run produces.

    ``classification`` maps ``kind-window`` to ``{"correct", "total",
    "accuracy"}``; ``oracle_curves`` holds rows of
    ``{"curve", "kappa", "vus_pr", "auc_pr"}``.
    """

    rows: list
    classification: dict = field(default_factory=dict)
    oracle_curves: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    folds: list = field(default_factory=list)
    training_time_s: dict = field(default_factory=dict)

    def methods(self) -> list:
        return list(dict.fromkeys(r.method for r in self.rows))

    def per_method(self, measure: str = "vus_pr") -> dict:
        out = {}
        for r in self.rows:
            out.setdefault(r.method, []).append(getattr(r, measure))
        return out

    def aggregates(self) -> dict:
        """Mean and median of each accuracy measure per method (no timings)."""
        table = {}
        for method in self.methods():
            auc = [r.auc_pr for r in self.rows if r.method == method]
            vus = [r.vus_pr for r in self.rows if r.method == method]
            table[method] = {
                "n_series": len(auc),
                "auc_pr_mean": float(np.mean(auc)),
                "auc_pr_median": float(np.median(auc)),
                "vus_pr_mean": float(np.mean(vus)),
                "vus_pr_median": float(np.median(vus)),
            }
        return {
            "config": self.config,
            "folds": self.folds,
            "methods": table,
            "classification_accuracy": self.classification,
        }

    def timing_summary(self) -> dict:
        out = {"training_time_s": self.training_time_s, "methods": {}}
        for method in self.methods():
            sel = [r.selection_time_s for r in self.rows if r.method == method]
            det = [r.detection_time_s for r in self.rows if r.method == method]
            out["methods"][method] = {
                "selection_time_s_mean": float(np.mean(sel)),
                "detection_time_s_mean": float(np.mean(det)),
            }
        return out

    def best_selector(self, strategy: str = "average", k: int = 5, measure: str = "vus_pr"):
        """``(kind, window)`` with the highest mean ``measure`` at the given strategy and k."""
        best, best_value = None, -np.inf
        for method, values in self.per_method(measure).items():
            parsed = parse_method_name(method)
            if parsed is None or parsed[2:] != (strategy, k):
                continue
            value = float(np.mean(values))
            if value > best_value:
                best, best_value = parsed[:2], value
        if best is None:
            raise KeyError(f"no selector evaluated with strategy={strategy} and k={k}")
        return best

    def aggregate(self, method: str, measure: str = "vus_pr") -> float:
        values = self.per_method(measure).get(method)
        if not values:
            raise KeyError(method)
        return float(np.mean(values))


def _write_table(path, header, records):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for rec in records:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in rec])


def emit_plot_data(report: EvaluationReport, out_dir, detector_names=()) -> list[Path]:
    """Tidy CSV tables, one per figure family, under ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    agg = report.aggregates()["methods"]
    written = []

    path = out_dir / "vus_distribution.csv"
    _write_table(
        path,
        ["method", "family", "series_id", "dataset_id", "vus_pr", "auc_pr"],
        [
            (r.method, _family(r.method, detector_names), r.series_id, r.dataset_id, r.vus_pr, r.auc_pr)
            for r in report.rows
        ],
    )
    written.append(path)

    parsed = [(m, parse_method_name(m)) for m in agg]
    parsed = [(m, p) for m, p in parsed if p is not None]

    path = out_dir / "accuracy_vs_k.csv"
    _write_table(
        path,
        ["selector", "window", "strategy", "k", "vus_pr_mean", "auc_pr_mean"],
        [(p[0], p[1], p[2], p[3], agg[m]["vus_pr_mean"], agg[m]["auc_pr_mean"]) for m, p in sorted(parsed, key=lambda x: x[1])],
    )
    written.append(path)

    path = out_dir / "accuracy_vs_window.csv"
    _write_table(
        path,
        ["selector", "strategy", "k", "window", "vus_pr_mean", "auc_pr_mean"],
        [
            (p[0], p[2], p[3], p[1], agg[m]["vus_pr_mean"], agg[m]["auc_pr_mean"])
            for m, p in sorted(parsed, key=lambda x: (x[1][0], x[1][2], x[1][3], x[1][1]))
        ],
    )
    written.append(path)

    path = out_dir / "classification_vs_detection.csv"
    records = []
    for m, p in parsed:
        key = f"{p[0]}-{p[1]}"
        if key in report.classification:
            records.append((m, p[0], p[1], p[2], p[3], report.classification[key]["accuracy"], agg[m]["vus_pr_mean"]))
    _write_table(
        path,
        ["method", "selector", "window", "strategy", "k", "classification_accuracy", "vus_pr_mean"],
        records,
    )
    written.append(path)

    path = out_dir / "oracle_bounds.csv"
    _write_table(
        path,
        ["curve", "kappa", "vus_pr", "auc_pr"],
        [(c["curve"], c["kappa"], c["vus_pr"], c["auc_pr"]) for c in report.oracle_curves],
    )
    written.append(path)
    return written


def _family(method, detector_names):
    if method in DETECTOR_BASELINES:
        return method
    if method in detector_names:
        return "detector"
    return "selector"


def write_report(report: EvaluationReport, out_dir, detector_names=()) -> dict:
    """results.csv, aggregates.json, timings.json and plots/*.csv."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_results(report.rows, out_dir / "results.csv")
    with open(out_dir / "aggregates.json", "w") as fh:
        json.dump(report.aggregates(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(out_dir / "timings.json", "w") as fh:
        json.dump(report.timing_summary(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    plots = emit_plot_data(report, out_dir / "plots", detector_names)
    return {
        "results": out_dir / "results.csv",
        "aggregates": out_dir / "aggregates.json",
        "timings": out_dir / "timings.json",
        "plots": plots,
    }
