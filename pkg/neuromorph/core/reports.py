"""
CSV and JSON report writers
"""

import csv
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator, List, Optional, Sequence, Union

from .schemas import (
    MEASUREMENT_FIELDS,
    METRIC_FIELDS,
    AccuracyTable,
    ImageMetrics,
    MeasurementRecord,
    ReportBundle,
    SegMetrics,
)

PathLike = Union[str, Path]

MEASUREMENT_HEADER = [
    "image_id",
    "instance_id",
    "source",
    "length_px",
    "width_px",
    "area_px2",
    "min_intensity",
    "mean_intensity",
    "max_intensity",
]
UNDEFINED = "undefined"


def percent(ratio: float) -> str:
    return f"{100.0 * ratio:.2f}"


@contextmanager
def _csv_writer(path: PathLike) -> Iterator[Any]:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        yield csv.writer(f, lineterminator="\n")


def _metric_cells(metrics: SegMetrics) -> List[str]:
    """Percent values in METRIC_FIELDS order; 0/0 ratios read 'undefined'"""
    return [UNDEFINED if name in metrics.undefined else percent(value) for name, value in metrics.as_row().items()]


def write_measurements_csv(path: PathLike, records: Sequence[MeasurementRecord]) -> None:
    with _csv_writer(path) as writer:
        writer.writerow(MEASUREMENT_HEADER)
        for r in records:
            writer.writerow(
                [
                    r.image_id,
                    r.instance_id,
                    r.source,
                    r.length,
                    r.width,
                    r.area,
                    r.min_intensity,
                    f"{r.mean_intensity:.2f}",
                    r.max_intensity,
                ]
            )


def write_metrics_csv(path: PathLike, metrics: SegMetrics) -> None:
    with _csv_writer(path) as writer:
        writer.writerow(["metric", "value_percent"])
        for name, cell in zip(METRIC_FIELDS, _metric_cells(metrics)):
            writer.writerow([name, cell])


def write_per_image_csv(path: PathLike, per_image: Sequence[ImageMetrics]) -> None:
    with _csv_writer(path) as writer:
        writer.writerow(["image_id"] + METRIC_FIELDS)
        for item in per_image:
            writer.writerow([item.image_id] + _metric_cells(item.metrics))


def write_accuracy_csv(path: PathLike, table: Optional[AccuracyTable]) -> None:
    """Accuracy rows; every value reads 'undefined' when no cell was matched"""
    with _csv_writer(path) as writer:
        writer.writerow(["metric", "accuracy_percent"])
        for name in MEASUREMENT_FIELDS + ["overall_macro", "overall_micro"]:
            if table is None:
                writer.writerow([name, UNDEFINED])
            elif name in table.per_metric:
                writer.writerow([name, f"{table.per_metric[name]:.2f}"])
            else:
                writer.writerow([name, f"{getattr(table, name):.2f}"])


def write_report_json(path: PathLike, bundle: ReportBundle) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(bundle.model_dump_json(indent=2), encoding="utf-8")


def read_report_json(path: PathLike) -> ReportBundle:
    return ReportBundle.model_validate_json(Path(path).read_text(encoding="utf-8"))
