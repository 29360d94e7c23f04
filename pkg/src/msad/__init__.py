"""Model selection and weighted combination of time series anomaly detectors."""

from .combine import (
    InferenceResult,
    aggregate_average,
    aggregate_vote,
    combine_scores,
    run_inference,
    top_k_renormalize,
)
from .core import (
    TimeSeries,
    Window,
    align_score,
    minmax_normalize,
    segment,
    segment_array,
    znormalize,
)
from .detectors import DetectorRegistry, default_registry
from .evaluation import AccuracyMatrix, auc_pr, avg_ens, oracle, oracle_kj, vus_pr
from .pipeline import MSAD
from .synthetic import generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "AccuracyMatrix",
    "DetectorRegistry",
    "InferenceResult",
    "MSAD",
    "TimeSeries",
    "Window",
    "aggregate_average",
    "aggregate_vote",
    "align_score",
    "auc_pr",
    "avg_ens",
    "combine_scores",
    "default_registry",
    "generate_synthetic",
    "minmax_normalize",
    "oracle",
    "oracle_kj",
    "run_inference",
    "segment",
    "segment_array",
    "top_k_renormalize",
    "vus_pr",
    "znormalize",
]
