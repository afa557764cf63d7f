"""Mask builders and fixture writers shared by the tests."""
import numpy as np

from neuromorph.core.annotations import (
    AnnotationSet,
    PolygonInstance,
    mask_to_rings,
    serialize_annotations,
    serialize_rle_instances,
)
from neuromorph.core.masks import Instance


def rect_mask(height, width, x, y, w, h):
    """Boolean canvas with one filled w x h rectangle at column x, row y."""
    mask = np.zeros((height, width), dtype=bool)
    mask[y:y + h, x:x + w] = True
    return mask


def disk_mask(height, width, cx, cy, r):
    ys, xs = np.mgrid[0:height, 0:width]
    return (xs + 0.5 - cx) ** 2 + (ys + 0.5 - cy) ** 2 <= r * r


def write_gt(path, masks, width, height):
    """Write masks as a canonical polygon document with ids 1..n."""
    annotation_set = AnnotationSet(
        width,
        height,
        [PolygonInstance(i, "neuron", mask_to_rings(m)) for i, m in enumerate(masks, start=1)],
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_annotations(annotation_set), encoding="utf-8")


def write_pred(path, masks, width, height):
    """Write masks as a multi-instance RLE document with ids 1..n."""
    instances = [Instance.from_mask(i, m) for i, m in enumerate(masks, start=1)]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_rle_instances(instances, width, height), encoding="utf-8")


def read_csv_rows(path):
    return [line.split(",") for line in path.read_text(encoding="utf-8").splitlines()]
