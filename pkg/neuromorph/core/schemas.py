"""Shared schemas for measurements, match results, reports and synthetic corpora."""
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

MEASUREMENT_FIELDS = [
    "length",
    "width",
    "area",
    "min_intensity",
    "mean_intensity",
    "max_intensity",
]

METRIC_FIELDS = [
    "precision",
    "recall",
    "f1",
    "iou_accuracy",
    "sq",
    "rq",
    "pq",
    "pixel_accuracy",
]

U64_MAX = (1 << 64) - 1


class Measurements(BaseModel):
    """Per-cell morphometry. Length/width come from the bounding box height/width."""
    length: int = Field(..., ge=1)
    width: int = Field(..., ge=1)
    area: int = Field(..., ge=1)
    min_intensity: int = Field(..., ge=0, le=255)
    mean_intensity: float = Field(..., ge=0, le=255)
    max_intensity: int = Field(..., ge=0, le=255)

    @model_validator(mode="after")
    def _check_consistency(self) -> "Measurements":
        if not self.min_intensity <= self.mean_intensity <= self.max_intensity:
            raise ValueError("expected min_intensity <= mean_intensity <= max_intensity")
        if self.area > self.length * self.width:
            raise ValueError("area exceeds bounding box")
        return self


class MeasurementRecord(Measurements):
    """Measurements tagged with their image, instance and source ("gt" / "pred")."""
    image_id: str
    instance_id: int
    source: str


class MatchedPair(BaseModel):
    gt_id: int
    pred_id: int
    iou: float = Field(..., ge=0, le=1)


class MatchResult(BaseModel):
    """TP pairs plus unmatched ground truth (FN) and unmatched predictions (FP)."""
    pairs: List[MatchedPair] = Field(default_factory=list)
    unmatched_gt: List[int] = Field(default_factory=list)
    unmatched_pred: List[int] = Field(default_factory=list)
    threshold: float = 0.5

    @property
    def tp(self) -> int:
        return len(self.pairs)

    @property
    def fp(self) -> int:
        return len(self.unmatched_pred)

    @property
    def fn(self) -> int:
        return len(self.unmatched_gt)


class SegMetrics(BaseModel):
    """Instance segmentation metrics plus the pooled counts they were derived from."""
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0
    iou_accuracy: float = 0.0
    sq: float = 0.0
    rq: float = 0.0
    pq: float = 0.0
    pixel_accuracy: float = 0.0

    tp: int = 0
    fp: int = 0
    fn: int = 0
    iou_sum: float = 0.0
    pixel_agree: int = 0
    pixel_total: int = 0
    # fields whose value came from a 0/0 ratio
    undefined: List[str] = Field(default_factory=list)

    def as_row(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_FIELDS}


class AccuracyTable(BaseModel):
    """Mean per-metric agreement (percent) between matched GT and predicted cells."""
    per_metric: Dict[str, float]
    overall_macro: float = Field(..., ge=0, le=100)
    overall_micro: float = Field(..., ge=0, le=100)
    n_pairs: int = Field(..., ge=1)

    @field_validator("per_metric")
    @classmethod
    def _check_per_metric(cls, value: Dict[str, float]) -> Dict[str, float]:
        if list(value) != MEASUREMENT_FIELDS:
            raise ValueError(f"per_metric keys must be {MEASUREMENT_FIELDS}")
        if any(not 0 <= v <= 100 for v in value.values()):
            raise ValueError("per-metric accuracies must lie in [0, 100]")
        return value


class ImageMetrics(BaseModel):
    image_id: str
    metrics: SegMetrics


class ImageFailure(BaseModel):
    image_id: str
    reason: str


class ReportBundle(BaseModel):
    """Everything one evaluation run produces."""
    per_image: List[ImageMetrics] = Field(default_factory=list)
    dataset: SegMetrics
    aggregation: str = "micro"
    measurements: List[MeasurementRecord] = Field(default_factory=list)
    accuracy: Optional[AccuracyTable] = None
    failures: List[ImageFailure] = Field(default_factory=list)
    threshold: float = 0.5
    connectivity: int = 8
    resolution: Optional[Tuple[int, int]] = None


# Synthetic corpus schemas
def _check_range(value: Tuple[float, float]) -> Tuple[float, float]:
    lo, hi = value
    if lo > hi:
        raise ValueError(f"empty range ({lo}, {hi})")
    return value


class SceneConfig(BaseModel):
    """Synthetic neuron-like scene parameters."""
    width: int = Field(256, ge=32)
    height: int = Field(256, ge=32)
    n_cells: int = Field(8, ge=0)
    soma_radius_range: Tuple[float, float] = (4.0, 8.0)
    neurites_per_cell: Tuple[int, int] = (2, 4)
    neurite_length_range: Tuple[float, float] = (10.0, 30.0)
    neurite_thickness: float = Field(2.0, gt=0)
    foreground_intensity_range: Tuple[int, int] = (120, 230)
    background_level: int = Field(20, ge=0, le=255)
    noise_amplitude: int = Field(10, ge=0, le=255)
    seed: int = Field(0, ge=0, le=U64_MAX)
    max_attempts: int = Field(200, ge=1)

    @field_validator("soma_radius_range")
    @classmethod
    def _check_soma(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        if value[0] <= 0:
            raise ValueError("soma radii must be positive")
        return _check_range(value)

    @field_validator("neurites_per_cell", "neurite_length_range")
    @classmethod
    def _check_nonnegative_range(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        if value[0] < 0:
            raise ValueError("range must be non-negative")
        return _check_range(value)

    @field_validator("foreground_intensity_range")
    @classmethod
    def _check_intensity(cls, value: Tuple[int, int]) -> Tuple[int, int]:
        if not (0 <= value[0] <= 255 and 0 <= value[1] <= 255):
            raise ValueError("intensities must lie in [0, 255]")
        return _check_range(value)


class PerturbSpec(BaseModel):
    """Controlled degradation applied to ground truth to fake a prediction."""
    dilate_px: int = Field(0, ge=0)
    erode_px: int = Field(0, ge=0)
    drop_prob: float = Field(0.0, ge=0, le=1)
    split_prob: float = Field(0.0, ge=0, le=1)
    spurious_count: int = Field(0, ge=0)
    seed: int = Field(0, ge=0, le=U64_MAX)

    @model_validator(mode="after")
    def _check_morphology(self) -> "PerturbSpec":
        if self.dilate_px and self.erode_px:
            raise ValueError("dilate_px and erode_px cannot both be non-zero")
        return self


class SynthConfig(BaseModel):
    """Corpus file consumed by `neuromorph synth`."""
    scenes: int = Field(1, ge=1)
    scene: SceneConfig = Field(default_factory=SceneConfig)
    perturb: Optional[PerturbSpec] = None
