"""
Segmentation metrics: precision, recall, F1, SQ / RQ / PQ and pixel accuracy
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .schemas import METRIC_FIELDS, MatchResult, SegMetrics

logger = logging.getLogger(__name__)


def _ratio(num: float, den: float, name: str, undefined: List[str]) -> float:
    if den == 0:
        undefined.append(name)
        return 0.0
    return num / den


def pixel_agreement(gt_union: np.ndarray, pred_union: np.ndarray) -> Tuple[int, int]:
    """(agreeing pixels, total pixels) between two foreground masks"""
    if gt_union.shape != pred_union.shape:
        raise ValueError(
            f"mask dimensions differ: {gt_union.shape[::-1]} vs {pred_union.shape[::-1]}"
        )
    return int(np.count_nonzero(gt_union == pred_union)), int(gt_union.size)


def pixel_accuracy(gt_union: np.ndarray, pred_union: np.ndarray) -> float:
    """Fraction of pixels where foreground/background labels agree"""
    agree, total = pixel_agreement(gt_union, pred_union)
    return agree / total if total else 0.0


def _from_counts(
    tp: int, fp: int, fn: int, iou_sum: float, pixel_agree: int, pixel_total: int
) -> SegMetrics:
    undefined: List[str] = []
    precision = _ratio(tp, tp + fp, "precision", undefined)
    recall = _ratio(tp, tp + fn, "recall", undefined)
    f1 = _ratio(2 * precision * recall, precision + recall, "f1", undefined)
    sq = _ratio(iou_sum, tp, "sq", undefined)
    rq = _ratio(tp, tp + 0.5 * fp + 0.5 * fn, "rq", undefined)
    pixel = _ratio(pixel_agree, pixel_total, "pixel_accuracy", undefined)
    if "sq" in undefined:
        undefined.insert(undefined.index("sq"), "iou_accuracy")
    if "sq" in undefined or "rq" in undefined:
        undefined.append("pq")
    return SegMetrics(
        precision=precision,
        recall=recall,
        f1=f1,
        iou_accuracy=sq,
        sq=sq,
        rq=rq,
        pq=sq * rq,
        pixel_accuracy=pixel,
        tp=tp,
        fp=fp,
        fn=fn,
        iou_sum=iou_sum,
        pixel_agree=pixel_agree,
        pixel_total=pixel_total,
        undefined=undefined,
    )


def segmentation_metrics(
    m: MatchResult, pixels: Optional[Tuple[int, int]] = None
) -> SegMetrics:
    """Instance metrics from one match result.

    `pixels` is the (agree, total) pair from pixel_agreement; without it
    pixel_accuracy is reported as undefined.
    """
    iou_sum = float(sum(p.iou for p in m.pairs))
    agree, total = pixels if pixels is not None else (0, 0)
    metrics = _from_counts(m.tp, m.fp, m.fn, iou_sum, agree, total)
    if metrics.undefined:
        logger.debug(f"Undefined (0/0) metrics reported as 0: {metrics.undefined}")
    return metrics


def aggregate_metrics(items: Sequence[SegMetrics], per_image: bool = False) -> SegMetrics:
    """Dataset-level metrics.

    Default micro mode pools TP/FP/FN, IoU sums and pixel counts across
    images. Per-image mode averages each metric over images instead, in
    which case pq is the mean of per-image pq, not sq * rq of the means.
    """
    tp = sum(m.tp for m in items)
    fp = sum(m.fp for m in items)
    fn = sum(m.fn for m in items)
    iou_sum = float(sum(m.iou_sum for m in items))
    agree = sum(m.pixel_agree for m in items)
    total = sum(m.pixel_total for m in items)
    pooled = _from_counts(tp, fp, fn, iou_sum, agree, total)
    if not per_image:
        if pooled.undefined:
            logger.warning(f"Dataset metrics undefined (0/0), reported as 0: {pooled.undefined}")
        return pooled
    if not items:
        return pooled

    means = {
        name: float(np.mean([getattr(m, name) for m in items])) for name in METRIC_FIELDS
    }
    undefined = [
        name for name in METRIC_FIELDS if all(name in m.undefined for m in items)
    ]
    return pooled.model_copy(update={**means, "undefined": undefined})
