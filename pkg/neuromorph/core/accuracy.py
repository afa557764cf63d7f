"""
Measurement accuracy of predicted cells against their matched ground truth
"""

import math
from typing import Dict, Mapping, Sequence, Tuple

import numpy as np

from .schemas import MEASUREMENT_FIELDS, AccuracyTable, Measurements


def pair_accuracy(pred: float, gt: float) -> float:
    """100 * min / max, and 100 when both values are zero"""
    for name, value in (("pred", pred), ("gt", gt)):
        if not math.isfinite(value) or value < 0:
            raise ValueError(f"{name} must be finite and non-negative, got {value}")
    if pred == gt:
        return 100.0
    return min(100.0, 100.0 * min(pred, gt) / max(pred, gt))


def overall_from_per_metric(per_metric: Mapping[str, float]) -> float:
    """Arithmetic mean of the per-metric accuracies"""
    if not per_metric:
        raise ValueError("no per-metric accuracies to average")
    return math.fsum(per_metric.values()) / len(per_metric)


def measurement_accuracy(pairs: Sequence[Tuple[Measurements, Measurements]]) -> AccuracyTable:
    """Average agreement per measurement over matched (gt, pred) pairs.

    overall_macro is the mean of the six per-metric means; overall_micro is
    the mean over every cell-metric score. With one score per metric per pair
    the two coincide up to rounding.
    """
    if not pairs:
        raise ValueError("measurement accuracy needs at least one matched pair")

    scores = np.array(
        [
            [pair_accuracy(float(getattr(pred, k)), float(getattr(gt, k))) for k in MEASUREMENT_FIELDS]
            for gt, pred in pairs
        ]
    )
    per_metric: Dict[str, float] = {
        k: math.fsum(scores[:, i]) / len(pairs) for i, k in enumerate(MEASUREMENT_FIELDS)
    }
    return AccuracyTable(
        per_metric=per_metric,
        overall_macro=overall_from_per_metric(per_metric),
        overall_micro=math.fsum(scores.ravel()) / scores.size,
        n_pairs=len(pairs),
    )
