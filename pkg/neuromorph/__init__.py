"""
neuromorph - instance segmentation evaluation and cell morphometry
"""

from .core import (
    AccuracyTable,
    BBox,
    EvaluationConfig,
    EvaluationEngine,
    Instance,
    MatchResult,
    Measurements,
    PerturbSpec,
    ReportBundle,
    SceneConfig,
    SegMetrics,
    SynthConfig,
)
from .api import MorphometryApi, evaluate, measure, synthesize

__version__ = "0.1.0"

__all__ = [
    "EvaluationConfig",
    "EvaluationEngine",
    "MorphometryApi",
    "measure",
    "evaluate",
    "synthesize",
    "AccuracyTable",
    "BBox",
    "Instance",
    "MatchResult",
    "Measurements",
    "PerturbSpec",
    "ReportBundle",
    "SceneConfig",
    "SegMetrics",
    "SynthConfig",
]
