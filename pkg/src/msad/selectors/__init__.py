from .conv import ConvLiteClassifier
from .dataset import WindowDataset, attribute_labels, build_window_dataset, split_series
from .model import (
    FEATURE_KINDS,
    RAW_KINDS,
    SELECTOR_KINDS,
    SelectorModel,
    classification_accuracy,
    fit_selector,
    load_model,
    save_model,
    vote_per_series,
)
from .rocket import RocketLiteClassifier

__all__ = [
    "ConvLiteClassifier",
    "FEATURE_KINDS",
    "RAW_KINDS",
    "RocketLiteClassifier",
    "SELECTOR_KINDS",
    "SelectorModel",
    "WindowDataset",
    "attribute_labels",
    "build_window_dataset",
    "classification_accuracy",
    "fit_selector",
    "load_model",
    "save_model",
    "split_series",
    "vote_per_series",
]
