"""
Per-cell morphometry: bounding-box length/width, pixel area and intensity statistics
"""

from typing import List, Sequence, Tuple

import numpy as np

from .masks import Instance, bounding_box
from .schemas import Measurements


class MeasurementError(ValueError):
    """Raised when an instance cannot be measured"""

    def __init__(self, instance_id: int, reason: str):
        self.instance_id = instance_id
        super().__init__(f"instance {instance_id}: {reason}")


def measure_instance(inst: Instance, img: np.ndarray) -> Measurements:
    """Measure one instance against the grayscale image it was segmented from.

    Length is the bounding-box height and width the bounding-box width; the
    intensity statistics run over exactly the foreground pixels.
    """
    if inst.mask.shape != img.shape:
        raise ValueError(
            f"mask {inst.mask.shape[::-1]} and image {img.shape[::-1]} dimensions differ"
        )
    values = img[inst.mask]
    if values.size == 0:
        raise ValueError("cannot measure an empty mask")

    bbox = bounding_box(inst.mask)
    return Measurements(
        length=bbox.h,
        width=bbox.w,
        area=int(values.size),
        min_intensity=int(values.min()),
        mean_intensity=int(values.sum(dtype=np.int64)) / values.size,
        max_intensity=int(values.max()),
    )


def measure_all(instances: Sequence[Instance], img: np.ndarray) -> List[Tuple[int, Measurements]]:
    """Measure every instance; records are ordered by instance id"""
    records = []
    for inst in sorted(instances, key=lambda i: i.id):
        try:
            records.append((inst.id, measure_instance(inst, img)))
        except ValueError as e:
            raise MeasurementError(inst.id, str(e)) from e
    return records
