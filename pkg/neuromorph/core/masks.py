"""
Binary-mask primitives: connected components, bounding boxes, area, IoU
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from scipy import ndimage

from .image_io import resize

logger = logging.getLogger(__name__)

CONNECTIVITY = [4, 8]


@dataclass(frozen=True)
class BBox:
    """Tight axis-aligned box: leftmost column, topmost row, width, height"""

    x: int
    y: int
    w: int
    h: int


@dataclass(frozen=True)
class Instance:
    """One segmented cell"""

    id: int
    mask: np.ndarray
    bbox: BBox

    @classmethod
    def from_mask(cls, instance_id: int, mask: np.ndarray) -> "Instance":
        mask = np.asarray(mask, dtype=bool)
        return cls(id=int(instance_id), mask=mask, bbox=bounding_box(mask))

    @property
    def area(self) -> int:
        return area(self.mask)


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"mask dimensions differ: {a.shape[::-1]} vs {b.shape[::-1]}")


def _structure(connectivity: int) -> np.ndarray:
    if connectivity not in CONNECTIVITY:
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    return ndimage.generate_binary_structure(2, 1 if connectivity == 4 else 2)


def connected_components(mask: np.ndarray, connectivity: int = 8) -> List[Instance]:
    """Split a mask into maximal connected regions.

    Ids start at 1 and follow the raster-scan order of each component's
    first pixel.
    """
    labels, count = ndimage.label(np.asarray(mask, dtype=bool), structure=_structure(connectivity))
    if count == 0:
        return []

    flat = labels.ravel()
    found, first_index = np.unique(flat, return_index=True)
    keep = found != 0
    ordered = found[keep][np.argsort(first_index[keep], kind="stable")]

    instances = []
    for new_id, label in enumerate(ordered, start=1):
        instances.append(Instance.from_mask(new_id, labels == label))
    return instances


def bounding_box(mask: np.ndarray) -> BBox:
    rows = np.flatnonzero(mask.any(axis=1))
    if rows.size == 0:
        raise ValueError("bounding box of an empty mask is undefined")
    cols = np.flatnonzero(mask.any(axis=0))
    return BBox(
        x=int(cols[0]),
        y=int(rows[0]),
        w=int(cols[-1] - cols[0] + 1),
        h=int(rows[-1] - rows[0] + 1),
    )


def area(mask: np.ndarray) -> int:
    return int(np.count_nonzero(mask))


def iou(a: np.ndarray, b: np.ndarray) -> float:
    """|a ∩ b| / |a ∪ b|, or 0.0 when both masks are empty"""
    _check_same_shape(a, b)
    union = np.count_nonzero(a | b)
    if union == 0:
        return 0.0
    return np.count_nonzero(a & b) / union


def union_mask(instances: Sequence[Instance], width: int, height: int) -> np.ndarray:
    out = np.zeros((height, width), dtype=bool)
    for inst in instances:
        _check_same_shape(out, inst.mask)
        out |= inst.mask
    return out


def boundary(mask: np.ndarray) -> np.ndarray:
    """Foreground pixels 4-adjacent to background (outside the canvas is background)"""
    mask = np.asarray(mask, dtype=bool)
    interior = ndimage.binary_erosion(mask, structure=_structure(4), border_value=0)
    return mask & ~interior


def _square(radius: int) -> np.ndarray:
    return np.ones((2 * radius + 1, 2 * radius + 1), dtype=bool)


def dilate(mask: np.ndarray, radius: int) -> np.ndarray:
    if radius <= 0:
        return mask.copy()
    return ndimage.binary_dilation(mask, structure=_square(radius))


def erode(mask: np.ndarray, radius: int) -> np.ndarray:
    if radius <= 0:
        return mask.copy()
    return ndimage.binary_erosion(mask, structure=_square(radius), border_value=0)


def resize_instances(instances: Sequence[Instance], width: int, height: int) -> List[Instance]:
    """Nearest-mode resize of every mask; instances that vanish are dropped"""
    resized = []
    for inst in instances:
        mask = resize(inst.mask, width, height, mode="nearest")
        if not mask.any():
            logger.warning(f"Instance {inst.id} vanished when resized to {width}x{height}; dropped")
            continue
        resized.append(Instance.from_mask(inst.id, mask))
    return resized
