"""
Evaluation engine - per-image measurement and evaluation pipeline
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .annotations import load_instance_file
from .config import EvaluationConfig
from .image_io import load_grayscale, normalize_to_u8, resize
from .masks import Instance, resize_instances, union_mask
from .matching import match_instances
from .metrics import pixel_agreement, segmentation_metrics
from .morphometry import measure_all
from .overlay import render_overlay
from .schemas import MatchResult, MeasurementRecord, Measurements, SegMetrics

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass
class ImageEvaluation:
    """Everything evaluate_image derives from one image"""

    image_id: str
    match: MatchResult
    metrics: SegMetrics
    records: List[MeasurementRecord]
    pairs: List[Tuple[Measurements, Measurements]]
    overlay: Optional[np.ndarray] = None


@dataclass
class FilePairing:
    """Files grouped by stem across input directories"""

    complete: Dict[str, Dict[str, Path]] = field(default_factory=dict)
    missing: Dict[str, List[str]] = field(default_factory=dict)


def index_directory(directory: PathLike, extensions: Sequence[str]) -> Dict[str, Path]:
    """Map file stem -> path for files with the given extensions"""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"Directory not found: {directory}")
    found: Dict[str, Path] = {}
    for path in sorted(directory.iterdir()):
        if path.is_file() and path.suffix.lower() in extensions:
            if path.stem in found:
                raise ValueError(f"ambiguous stem '{path.stem}' in {directory}: {found[path.stem].name}, {path.name}")
            found[path.stem] = path
    return found


def pair_files(**directories: Tuple[PathLike, Sequence[str]]) -> FilePairing:
    """Pair files by stem; stems absent from some directory are reported as missing"""
    indexes = {role: index_directory(d, exts) for role, (d, exts) in directories.items()}
    pairing = FilePairing()
    for stem in sorted(set().union(*indexes.values())):
        absent = [role for role, idx in indexes.items() if stem not in idx]
        if absent:
            pairing.missing[stem] = absent
        else:
            pairing.complete[stem] = {role: idx[stem] for role, idx in indexes.items()}
    return pairing


class EvaluationEngine:
    """Main engine: loads images and annotations at the working resolution"""

    def __init__(self, config: Optional[EvaluationConfig] = None):
        self.config = config or EvaluationConfig()

    def load_image(self, path: PathLike) -> Tuple[np.ndarray, Tuple[int, int]]:
        """Grayscale, min-max normalised, resized to the working resolution.

        Returns the image and its native (width, height).
        """
        gray = normalize_to_u8(load_grayscale(path))
        native = (gray.shape[1], gray.shape[0])
        if self.config.resolution is not None:
            width, height = self.config.resolution
            gray = resize(gray, width, height, mode="bilinear")
        return gray, native

    def load_instances(self, path: PathLike, native: Tuple[int, int], width: int, height: int) -> List[Instance]:
        """Instance masks rasterised at the native image size, then nearest-resized to width x height"""
        loaded = load_instance_file(path, self.config.connectivity)
        if (loaded.width, loaded.height) != native:
            raise ValueError(
                f"{Path(path).name} is {loaded.width}x{loaded.height} but the image is {native[0]}x{native[1]}"
            )
        if native == (width, height):
            return loaded.instances
        return resize_instances(loaded.instances, width, height)

    def _records(
        self, image_id: str, source: str, measured: Iterable[Tuple[int, Measurements]]
    ) -> List[MeasurementRecord]:
        return [
            MeasurementRecord(image_id=image_id, instance_id=inst_id, source=source, **m.model_dump())
            for inst_id, m in measured
        ]

    def measure_image(self, image_id: str, image_path: PathLike, annotation_path: PathLike) -> List[MeasurementRecord]:
        img, native = self.load_image(image_path)
        height, width = img.shape
        instances = self.load_instances(annotation_path, native, width, height)
        return self._records(image_id, self.config.source_label, measure_all(instances, img))

    def evaluate_image(
        self, image_id: str, image_path: PathLike, gt_path: PathLike, pred_path: PathLike
    ) -> ImageEvaluation:
        img, native = self.load_image(image_path)
        height, width = img.shape
        gt = self.load_instances(gt_path, native, width, height)
        pred = self.load_instances(pred_path, native, width, height)

        match = match_instances(gt, pred, self.config.threshold)
        pixels = pixel_agreement(union_mask(gt, width, height), union_mask(pred, width, height))
        metrics = segmentation_metrics(match, pixels)

        gt_measured = dict(measure_all(gt, img))
        pred_measured = dict(measure_all(pred, img))
        records = self._records(image_id, "gt", gt_measured.items())
        records += self._records(image_id, "pred", pred_measured.items())
        pairs = [(gt_measured[p.gt_id], pred_measured[p.pred_id]) for p in match.pairs]

        overlay = render_overlay(img, match, gt, pred) if self.config.write_overlays else None
        logger.debug(
            f"{image_id}: TP={match.tp} FP={match.fp} FN={match.fn} SQ={metrics.sq:.4f}"
        )
        return ImageEvaluation(image_id, match, metrics, records, pairs, overlay)
