"""
Annotation parsing (polygon JSON, RLE JSON) and rasterisation to binary masks

Canonical polygon document:
    {"image": {"width": W, "height": H},
     "instances": [{"id": 1, "class": "neuron", "rings": [[[x, y], ...]]}]}
RLE document (single raster, or one entry per instance):
    {"width": W, "height": H, "runs": [[value, length], ...]}
    {"width": W, "height": H, "instances": [{"id": 1, "runs": [...]}]}
Coordinates: x grows rightward, y downward, origin at the top-left pixel corner.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .masks import Instance, connected_components

logger = logging.getLogger(__name__)

DEFAULT_CLASS = "neuron"
MIN_COORDINATE = -1.0

Run = Tuple[int, int]


class AnnotationError(ValueError):
    """Raised for malformed annotation documents"""

    def __init__(self, message: str, index: Optional[int] = None):
        self.index = index
        if index is not None:
            message = f"instance {index}: {message}"
        super().__init__(message)


@dataclass
class PolygonInstance:
    """One annotated cell: closed rings of (x, y) vertices, unioned"""

    id: int
    class_name: str = DEFAULT_CLASS
    rings: List[np.ndarray] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.rings = [np.asarray(ring, dtype=np.float64).reshape(-1, 2) for ring in self.rings]
        for ring in self.rings:
            if len(ring) < 3:
                raise ValueError(f"ring with {len(ring)} vertices; at least 3 required")
            if not np.isfinite(ring).all():
                raise ValueError("ring has non-finite coordinates")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolygonInstance):
            return NotImplemented
        return (
            self.id == other.id
            and self.class_name == other.class_name
            and len(self.rings) == len(other.rings)
            and all(np.array_equal(a, b) for a, b in zip(self.rings, other.rings))
        )


@dataclass
class AnnotationSet:
    """Annotations of one image"""

    image_width: int
    image_height: int
    instances: List[PolygonInstance] = field(default_factory=list)


@dataclass
class LoadedInstances:
    """Instances read from any supported annotation file, at native resolution"""

    width: int
    height: int
    instances: List[Instance]


def _require(obj: Dict[str, Any], key: str, index: Optional[int] = None) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise AnnotationError(f"missing required key '{key}'", index)
    return obj[key]


def _as_int(value: Any, name: str, index: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
        raise AnnotationError(f"'{name}' must be an integer, got {value!r}", index)
    return int(value)


def _image_size(doc: Dict[str, Any]) -> Tuple[int, int]:
    image = _require(doc, "image")
    width = _as_int(_require(image, "width"), "width")
    height = _as_int(_require(image, "height"), "height")
    if width < 1 or height < 1:
        raise AnnotationError(f"image size must be positive, got {width}x{height}")
    return width, height


def _build_rings(raw_rings: Sequence[Sequence[Tuple[float, float]]], index: int) -> List[np.ndarray]:
    rings = []
    for ring_no, raw in enumerate(raw_rings):
        try:
            ring = np.asarray(raw, dtype=np.float64)
        except (TypeError, ValueError):
            raise AnnotationError(f"ring {ring_no} is not a list of [x, y] pairs", index)
        if ring.size == 0:
            ring = ring.reshape(0, 2)
        if ring.ndim != 2 or ring.shape[1] != 2:
            raise AnnotationError(f"ring {ring_no} is not a list of [x, y] pairs", index)
        if not np.isfinite(ring).all():
            raise AnnotationError(f"ring {ring_no} has non-finite coordinates", index)
        if (ring < MIN_COORDINATE).any():
            raise AnnotationError(f"ring {ring_no} has coordinates below {MIN_COORDINATE}", index)
        if len(ring) < 3:
            logger.warning(f"Instance {index}: ring {ring_no} has {len(ring)} vertices; skipped")
            continue
        rings.append(ring)
    if not rings:
        raise AnnotationError("no ring with at least 3 vertices", index)
    return rings


def _parse_canonical(doc: Dict[str, Any]) -> AnnotationSet:
    width, height = _image_size(doc)
    raw_instances = _require(doc, "instances")
    if not isinstance(raw_instances, list):
        raise AnnotationError("'instances' must be a list")

    instances = []
    seen: Dict[int, int] = {}
    for index, raw in enumerate(raw_instances):
        instance_id = _as_int(_require(raw, "id", index), "id", index)
        if instance_id in seen:
            raise AnnotationError(f"duplicate id {instance_id} (first used by instance {seen[instance_id]})", index)
        seen[instance_id] = index
        raw_rings = _require(raw, "rings", index)
        if not isinstance(raw_rings, list):
            raise AnnotationError("'rings' must be a list", index)
        class_name = raw.get("class", DEFAULT_CLASS)
        instances.append(PolygonInstance(instance_id, str(class_name), _build_rings(raw_rings, index)))
    return AnnotationSet(width, height, instances)


def _parse_darwin(doc: Dict[str, Any]) -> AnnotationSet:
    """Darwin subset: annotations[].polygon.path[].{x,y} (or polygon.paths)"""
    width, height = _image_size(doc)
    raw_annotations = doc["annotations"]
    if not isinstance(raw_annotations, list):
        raise AnnotationError("'annotations' must be a list")
    instances = []
    for index, raw in enumerate(raw_annotations):
        if not isinstance(raw, dict) or "polygon" not in raw:
            logger.debug(f"Darwin annotation {index} has no polygon; skipped")
            continue
        polygon = raw["polygon"]
        if not isinstance(polygon, dict):
            raise AnnotationError("'polygon' must be an object", index)
        if "paths" in polygon:
            paths = polygon["paths"]
        else:
            paths = [_require(polygon, "path", index)]
        try:
            raw_rings = [[(point["x"], point["y"]) for point in path] for path in paths]
        except (KeyError, TypeError):
            raise AnnotationError("polygon vertices must be {x, y} objects", index)
        class_name = raw.get("name", DEFAULT_CLASS)
        instances.append(PolygonInstance(len(instances) + 1, str(class_name), _build_rings(raw_rings, index)))
    return AnnotationSet(width, height, instances)


def _load_json(text: str) -> Dict[str, Any]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise AnnotationError(f"malformed JSON ({e})") from e
    if not isinstance(doc, dict):
        raise AnnotationError("document root must be an object")
    return doc


def parse_annotations(text: str) -> AnnotationSet:
    """Parse a canonical (or Darwin-subset) polygon annotation document"""
    return _parse_document(_load_json(text))


def _parse_document(doc: Dict[str, Any]) -> AnnotationSet:
    if "annotations" in doc and "instances" not in doc:
        return _parse_darwin(doc)
    return _parse_canonical(doc)


def serialize_annotations(annotation_set: AnnotationSet) -> str:
    """Canonical JSON for an AnnotationSet"""
    doc = {
        "image": {"width": annotation_set.image_width, "height": annotation_set.image_height},
        "instances": [
            {
                "id": inst.id,
                "class": inst.class_name,
                "rings": [[[_json_number(x), _json_number(y)] for x, y in ring] for ring in inst.rings],
            }
            for inst in annotation_set.instances
        ],
    }
    return json.dumps(doc)


def _json_number(value: float) -> Union[int, float]:
    return int(value) if float(value).is_integer() else float(value)


def rasterize(inst: PolygonInstance, width: int, height: int) -> np.ndarray:
    """Pixel (col, row) is foreground iff its centre lies inside any ring (nonzero winding)"""
    if width < 1 or height < 1:
        raise ValueError(f"canvas must be at least 1x1, got {width}x{height}")
    mask = np.zeros((height, width), dtype=bool)
    for ring in inst.rings:
        c0 = max(0, math.floor(ring[:, 0].min()))
        c1 = min(width, math.ceil(ring[:, 0].max()) + 1)
        r0 = max(0, math.floor(ring[:, 1].min()))
        r1 = min(height, math.ceil(ring[:, 1].max()) + 1)
        if c0 >= c1 or r0 >= r1:
            continue
        px = np.arange(c0, c1, dtype=np.float64)[None, :] + 0.5
        py = np.arange(r0, r1, dtype=np.float64)[:, None] + 0.5
        winding = np.zeros((r1 - r0, c1 - c0), dtype=np.int64)
        for (x1, y1), (x2, y2) in zip(ring, np.roll(ring, -1, axis=0)):
            if y1 == y2:
                continue
            is_left = (x2 - x1) * (py - y1) - (px - x1) * (y2 - y1)
            if y1 <= y2:
                winding += (y1 <= py) & (py < y2) & (is_left > 0)
            else:
                winding -= (y2 <= py) & (py < y1) & (is_left < 0)
        mask[r0:r1, c0:c1] |= winding != 0
    return mask


def mask_to_rings(mask: np.ndarray) -> List[List[List[int]]]:
    """Exact polygon description of a mask as a union of integer rectangles.

    Horizontal runs repeated on consecutive rows are merged into one rectangle.
    """
    rects: List[Tuple[int, int, int, int]] = []
    open_runs: Dict[Tuple[int, int], int] = {}
    height = mask.shape[0]
    for row in range(height + 1):
        runs = set()
        if row < height:
            padded = np.concatenate(([False], mask[row], [False])).astype(np.int8)
            edges = np.flatnonzero(np.diff(padded))
            runs = {(int(s), int(e)) for s, e in zip(edges[::2], edges[1::2])}
        for run in [r for r in open_runs if r not in runs]:
            x0, x1 = run
            rects.append((open_runs.pop(run), x0, row, x1))
        for run in runs:
            open_runs.setdefault(run, row)
    rects.sort()
    return [[[x0, y0], [x1, y0], [x1, y1], [x0, y1]] for y0, x0, y1, x1 in rects]


def decode_rle(runs: Sequence[Run], width: int, height: int) -> np.ndarray:
    """Row-major fill of (value, length) runs"""
    values = []
    lengths = []
    for value, length in runs:
        if value not in (0, 1) or isinstance(value, bool):
            raise ValueError(f"run value must be 0 or 1, got {value!r}")
        numeric = isinstance(length, (int, float)) and not isinstance(length, bool)
        if not numeric or not (0 <= length < math.inf) or int(length) != length:
            raise ValueError(f"run length must be a non-negative integer, got {length!r}")
        values.append(bool(value))
        lengths.append(int(length))
    total = sum(lengths)
    if total != width * height:
        raise ValueError(f"run lengths sum to {total}, expected {width}x{height}={width * height}")
    flat = np.repeat(np.array(values, dtype=bool), lengths)
    return flat.reshape(height, width)


def encode_rle(mask: np.ndarray) -> List[Run]:
    flat = np.asarray(mask, dtype=bool).ravel()
    if flat.size == 0:
        return []
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [flat.size]))
    return [(int(flat[s]), int(e - s)) for s, e in zip(starts, ends)]


def serialize_rle(mask: np.ndarray) -> str:
    height, width = mask.shape
    return json.dumps({"width": width, "height": height, "runs": [list(r) for r in encode_rle(mask)]})


def serialize_rle_instances(instances: Sequence[Instance], width: int, height: int) -> str:
    doc = {
        "width": width,
        "height": height,
        "instances": [{"id": inst.id, "runs": [list(r) for r in encode_rle(inst.mask)]} for inst in instances],
    }
    return json.dumps(doc)


def _runs(raw: Any, index: Optional[int] = None) -> List[Run]:
    if not isinstance(raw, list) or not all(isinstance(r, list) and len(r) == 2 for r in raw):
        raise AnnotationError("'runs' must be a list of [value, length] pairs", index)
    return [(r[0], r[1]) for r in raw]


def _parse_rle_doc(doc: Dict[str, Any], connectivity: int) -> LoadedInstances:
    width = _as_int(_require(doc, "width"), "width")
    height = _as_int(_require(doc, "height"), "height")
    if "runs" in doc:
        try:
            mask = decode_rle(_runs(doc["runs"]), width, height)
        except ValueError as e:
            raise AnnotationError(str(e)) from e
        return LoadedInstances(width, height, connected_components(mask, connectivity))

    raw_instances = _require(doc, "instances")
    if not isinstance(raw_instances, list):
        raise AnnotationError("'instances' must be a list")
    instances = []
    seen = set()
    for index, raw in enumerate(raw_instances):
        instance_id = _as_int(_require(raw, "id", index), "id", index)
        if instance_id in seen:
            raise AnnotationError(f"duplicate id {instance_id}", index)
        seen.add(instance_id)
        try:
            mask = decode_rle(_runs(_require(raw, "runs", index), index), width, height)
        except ValueError as e:
            raise AnnotationError(str(e), index) from e
        if not mask.any():
            logger.warning(f"Instance {index} (id {instance_id}) has an empty mask; skipped")
            continue
        instances.append(Instance.from_mask(instance_id, mask))
    return LoadedInstances(width, height, instances)


def parse_rle(text: str, connectivity: int = 8) -> LoadedInstances:
    """Parse a single-raster or multi-instance RLE document.

    A single raster is split into instances with connected_components.
    """
    return _parse_rle_doc(_load_json(text), connectivity)


def load_instance_file(path: Union[str, Path], connectivity: int = 8) -> LoadedInstances:
    """Read polygon or RLE annotations and return native-resolution instance masks"""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Annotation file not found: {path}")
    doc = _load_json(path.read_text(encoding="utf-8"))

    if "runs" in doc or ("width" in doc and "image" not in doc):
        return _parse_rle_doc(doc, connectivity)

    annotation_set = _parse_document(doc)
    width, height = annotation_set.image_width, annotation_set.image_height
    instances = []
    for poly in annotation_set.instances:
        mask = rasterize(poly, width, height)
        if not mask.any():
            logger.warning(f"Instance {poly.id} in {path.name} covers no pixel centre; skipped")
            continue
        instances.append(Instance.from_mask(poly.id, mask))
    return LoadedInstances(width, height, instances)
