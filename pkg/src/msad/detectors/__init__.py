from .base import BaseDetector, dominant_period
from .density import LOF, NormA, PCADetector
from .iforest import IForest, IForest1, IsolationForest
from .matrix_profile import MatrixProfile, matrix_profile
from .pointwise import HBOS, POLY
from .registry import DetectorRegistry, default_registry

__all__ = [
    "BaseDetector",
    "DetectorRegistry",
    "HBOS",
    "IForest",
    "IForest1",
    "IsolationForest",
    "LOF",
    "MatrixProfile",
    "NormA",
    "PCADetector",
    "POLY",
    "default_registry",
    "dominant_period",
    "matrix_profile",
]
