"""
Core measurement and evaluation modules
"""

from .config import EvaluationConfig
from .engine import EvaluationEngine
from .masks import BBox, Instance
from .schemas import (
    AccuracyTable,
    MatchResult,
    Measurements,
    PerturbSpec,
    ReportBundle,
    SceneConfig,
    SegMetrics,
    SynthConfig,
)

__all__ = [
    "EvaluationConfig",
    "EvaluationEngine",
    "BBox",
    "Instance",
    "AccuracyTable",
    "MatchResult",
    "Measurements",
    "PerturbSpec",
    "ReportBundle",
    "SceneConfig",
    "SegMetrics",
    "SynthConfig",
]
