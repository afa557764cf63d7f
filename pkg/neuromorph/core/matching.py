"""
IoU matching of predicted instances to ground-truth instances
"""

from typing import List, Sequence, Tuple

import numpy as np

from .masks import BBox, Instance
from .schemas import MatchedPair, MatchResult

DEFAULT_THRESHOLD = 0.5


def _boxes_overlap(a: BBox, b: BBox) -> bool:
    return a.x < b.x + b.w and b.x < a.x + a.w and a.y < b.y + b.h and b.y < a.y + a.h


def _pair_iou(g: Instance, p: Instance) -> float:
    # intersection is confined to the overlap of the two boxes
    x0, y0 = max(g.bbox.x, p.bbox.x), max(g.bbox.y, p.bbox.y)
    x1 = min(g.bbox.x + g.bbox.w, p.bbox.x + p.bbox.w)
    y1 = min(g.bbox.y + g.bbox.h, p.bbox.y + p.bbox.h)
    inter = int(np.count_nonzero(g.mask[y0:y1, x0:x1] & p.mask[y0:y1, x0:x1]))
    if inter == 0:
        return 0.0
    return inter / (g.area + p.area - inter)


def candidate_pairs(
    gt: Sequence[Instance], pred: Sequence[Instance], threshold: float
) -> List[Tuple[float, int, int]]:
    """All (iou, gt_id, pred_id) with iou strictly above the threshold"""
    candidates = []
    for g in gt:
        for p in pred:
            if g.mask.shape != p.mask.shape:
                raise ValueError(
                    f"gt {g.id} and pred {p.id} dimensions differ: "
                    f"{g.mask.shape[::-1]} vs {p.mask.shape[::-1]}"
                )
            if not _boxes_overlap(g.bbox, p.bbox):
                continue
            value = _pair_iou(g, p)
            if value > threshold:
                candidates.append((value, g.id, p.id))
    return candidates


def match_instances(
    gt: Sequence[Instance], pred: Sequence[Instance], threshold: float = DEFAULT_THRESHOLD
) -> MatchResult:
    """Greedy one-to-one matching by descending IoU.

    Ties break on the smaller gt id, then the smaller pred id, so the result
    does not depend on input order. Above 0.5 each instance has at most one
    counterpart against a disjoint partner set, and greedy equals the unique
    matching.
    """
    if not 0 <= threshold < 1:
        raise ValueError(f"threshold must lie in [0, 1), got {threshold}")

    candidates = candidate_pairs(gt, pred, threshold)
    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))

    used_gt, used_pred = set(), set()
    pairs = []
    for value, gt_id, pred_id in candidates:
        if gt_id in used_gt or pred_id in used_pred:
            continue
        used_gt.add(gt_id)
        used_pred.add(pred_id)
        pairs.append(MatchedPair(gt_id=gt_id, pred_id=pred_id, iou=value))

    pairs.sort(key=lambda p: p.gt_id)
    return MatchResult(
        pairs=pairs,
        unmatched_gt=sorted(g.id for g in gt if g.id not in used_gt),
        unmatched_pred=sorted(p.id for p in pred if p.id not in used_pred),
        threshold=threshold,
    )
