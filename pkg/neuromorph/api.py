"""
High-level API for neuromorph
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Tuple, TypeVar, Union

from tqdm import tqdm

from .core import EvaluationConfig, EvaluationEngine
from .core.accuracy import measurement_accuracy
from .core.config import ANNOTATION_EXTENSIONS, IMAGE_EXTENSIONS
from .core.engine import ImageEvaluation, pair_files
from .core.image_io import save_png_rgb
from .core.metrics import aggregate_metrics
from .core.reports import (
    write_accuracy_csv,
    write_measurements_csv,
    write_metrics_csv,
    write_per_image_csv,
    write_report_json,
)
from .core.rng import SplitMix64
from .core.schemas import ImageFailure, ImageMetrics, MeasurementRecord, ReportBundle, SynthConfig
from .core.synth import export_scene, generate_scene, perturb

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
T = TypeVar("T")
R = TypeVar("R")


@dataclass
class MeasureSummary:
    """Outcome of a measure run"""

    records: List[MeasurementRecord] = field(default_factory=list)
    failures: List[ImageFailure] = field(default_factory=list)
    output: Optional[Path] = None


def _missing_failures(missing: dict) -> List[ImageFailure]:
    return [
        ImageFailure(image_id=stem, reason=f"no matching file in: {', '.join(roles)}")
        for stem, roles in missing.items()
    ]


class MorphometryApi:
    """High-level API for neuromorph"""

    def __init__(self, config: Optional[EvaluationConfig] = None):
        """Initialize API

        Args:
            config: EvaluationConfig instance (optional, uses default if not provided)
        """
        self.config = config or EvaluationConfig()
        self._engine = None

    @property
    def engine(self) -> EvaluationEngine:
        """Get the evaluation engine, creating it if needed"""
        if self._engine is None:
            self._engine = EvaluationEngine(self.config)
        return self._engine

    def _map(self, fn: Callable[[T], R], items: List[T], desc: str) -> List[R]:
        """Apply fn to every item; results keep input order whatever the job count"""
        disable = not self.config.progress
        if self.config.jobs == 1:
            return [fn(item) for item in tqdm(items, desc=desc, disable=disable)]
        with ThreadPoolExecutor(max_workers=self.config.jobs) as pool:
            return list(tqdm(pool.map(fn, items), total=len(items), desc=desc, disable=disable))

    def measure_directory(self, images: PathLike, annotations: PathLike, out: PathLike) -> MeasureSummary:
        """
        Measure every annotated instance and write measurements.csv

        Args:
            images: Directory of PGM/PNG images
            annotations: Directory of annotation JSON files, paired with images by stem
            out: Output directory

        Returns:
            MeasureSummary with all records and per-image failures
        """
        pairing = pair_files(
            image=(images, IMAGE_EXTENSIONS), annotation=(annotations, ANNOTATION_EXTENSIONS)
        )
        summary = MeasureSummary(failures=_missing_failures(pairing.missing))

        def run(stem: str) -> Tuple[str, Union[List[MeasurementRecord], str]]:
            paths = pairing.complete[stem]
            try:
                return stem, self.engine.measure_image(stem, paths["image"], paths["annotation"])
            except (ValueError, OSError) as e:
                return stem, str(e)

        for stem, outcome in self._map(run, sorted(pairing.complete), "Measuring"):
            if isinstance(outcome, str):
                logger.error(f"{stem}: {outcome}")
                summary.failures.append(ImageFailure(image_id=stem, reason=outcome))
            else:
                summary.records.extend(outcome)

        summary.failures.sort(key=lambda f: f.image_id)
        summary.output = Path(out) / "measurements.csv"
        write_measurements_csv(summary.output, summary.records)
        logger.info(f"Measured {len(summary.records)} instances; {len(summary.failures)} failures")
        return summary

    def evaluate_directories(
        self, gt: PathLike, pred: PathLike, images: PathLike, out: PathLike
    ) -> ReportBundle:
        """
        Match predictions to ground truth and write every report

        Args:
            gt: Directory of ground-truth annotation files
            pred: Directory of prediction files (polygon or RLE JSON)
            images: Directory of PGM/PNG images
            out: Output directory

        Returns:
            ReportBundle; per-image failures are listed in bundle.failures
        """
        out = Path(out)
        pairing = pair_files(
            image=(images, IMAGE_EXTENSIONS),
            gt=(gt, ANNOTATION_EXTENSIONS),
            pred=(pred, ANNOTATION_EXTENSIONS),
        )
        failures = _missing_failures(pairing.missing)

        def run(stem: str) -> Union[ImageEvaluation, ImageFailure]:
            paths = pairing.complete[stem]
            try:
                return self.engine.evaluate_image(stem, paths["image"], paths["gt"], paths["pred"])
            except (ValueError, OSError) as e:
                return ImageFailure(image_id=stem, reason=str(e))

        evaluations = []
        for outcome in self._map(run, sorted(pairing.complete), "Evaluating"):
            if isinstance(outcome, ImageFailure):
                logger.error(f"{outcome.image_id}: {outcome.reason}")
                failures.append(outcome)
            else:
                evaluations.append(outcome)

        per_image = [ImageMetrics(image_id=e.image_id, metrics=e.metrics) for e in evaluations]
        pairs = [pair for e in evaluations for pair in e.pairs]
        accuracy = measurement_accuracy(pairs) if pairs else None
        if accuracy is None:
            logger.warning("No matched pairs; measurement accuracy is undefined")

        bundle = ReportBundle(
            per_image=per_image,
            dataset=aggregate_metrics([m.metrics for m in per_image], per_image=self.config.per_image),
            aggregation="per_image" if self.config.per_image else "micro",
            measurements=[r for e in evaluations for r in e.records],
            accuracy=accuracy,
            failures=sorted(failures, key=lambda f: f.image_id),
            threshold=self.config.threshold,
            connectivity=self.config.connectivity,
            resolution=self.config.resolution,
        )

        write_metrics_csv(out / "metrics.csv", bundle.dataset)
        write_per_image_csv(out / "per_image_metrics.csv", bundle.per_image)
        write_accuracy_csv(out / "accuracy.csv", bundle.accuracy)
        write_measurements_csv(out / "measurements.csv", bundle.measurements)
        write_report_json(out / "report.json", bundle)
        for e in evaluations:
            if e.overlay is not None:
                save_png_rgb(out / "overlays" / f"{e.image_id}.png", e.overlay)

        logger.info(
            f"Evaluated {len(evaluations)} images; PQ={bundle.dataset.pq:.4f}; {len(failures)} failures"
        )
        return bundle

    def synthesize_corpus(self, config: SynthConfig, out: PathLike) -> List[str]:
        """
        Generate images/, gt/ and pred/ trees consumable by evaluate_directories

        Args:
            config: SynthConfig (scene count, scene parameters, optional perturbation)
            out: Output directory

        Returns:
            Scene ids written
        """
        scene_seeds = SplitMix64(config.scene.seed)
        perturb_seeds = SplitMix64(config.perturb.seed) if config.perturb else None

        scene_ids = []
        for index in tqdm(range(config.scenes), desc="Synthesizing", disable=not self.config.progress):
            scene_id = f"scene_{index:03d}"
            scene_cfg = config.scene.model_copy(update={"seed": scene_seeds.next_u64()})
            image, gt = generate_scene(scene_cfg)
            if config.perturb is None:
                pred = list(gt)
            else:
                spec = config.perturb.model_copy(update={"seed": perturb_seeds.next_u64()})
                pred = perturb(gt, spec, shape=image.shape)
            export_scene(out, scene_id, image, gt, pred)
            scene_ids.append(scene_id)

        logger.info(f"Wrote {len(scene_ids)} scenes to {out}")
        return scene_ids


# Convenience functions for simple usage
def measure(images: PathLike, annotations: PathLike, out: PathLike,
            config: Optional[EvaluationConfig] = None) -> MeasureSummary:
    """Convenience function to measure a directory of annotated images"""
    return MorphometryApi(config).measure_directory(images, annotations, out)


def evaluate(gt: PathLike, pred: PathLike, images: PathLike, out: PathLike,
             config: Optional[EvaluationConfig] = None) -> ReportBundle:
    """Convenience function to evaluate predictions against ground truth"""
    return MorphometryApi(config).evaluate_directories(gt, pred, images, out)


def synthesize(config: SynthConfig, out: PathLike,
               eval_config: Optional[EvaluationConfig] = None) -> List[str]:
    """Convenience function to write a synthetic fixture corpus"""
    return MorphometryApi(eval_config).synthesize_corpus(config, out)
