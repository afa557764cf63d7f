"""
Visual comparison overlays: grayscale base with instance boundaries
"""

from typing import Sequence

import numpy as np

from .masks import Instance, boundary
from .schemas import MatchResult

MATCHED_COLOR = (0, 255, 0)
MISSED_COLOR = (0, 0, 255)  # FN
SPURIOUS_COLOR = (255, 0, 0)  # FP


def render_overlay(
    img: np.ndarray, m: MatchResult, gt: Sequence[Instance], pred: Sequence[Instance]
) -> np.ndarray:
    """RGB raster: matched-pair boundaries green, FN blue, FP red.

    Layers are painted in that order, so FP boundaries win where they cross.
    """
    rgb = np.repeat(img[:, :, None], 3, axis=2).astype(np.uint8)
    for inst in list(gt) + list(pred):
        if inst.mask.shape != img.shape:
            raise ValueError(
                f"instance {inst.id} mask {inst.mask.shape[::-1]} does not match image {img.shape[::-1]}"
            )

    matched_gt = {p.gt_id for p in m.pairs}
    matched_pred = {p.pred_id for p in m.pairs}
    missed = set(m.unmatched_gt)
    spurious = set(m.unmatched_pred)

    layers = [
        ([g for g in gt if g.id in matched_gt] + [p for p in pred if p.id in matched_pred], MATCHED_COLOR),
        ([g for g in gt if g.id in missed], MISSED_COLOR),
        ([p for p in pred if p.id in spurious], SPURIOUS_COLOR),
    ]
    for instances, color in layers:
        for inst in instances:
            rgb[boundary(inst.mask)] = color
    return rgb
