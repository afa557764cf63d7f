"""
Seeded synthetic neuron-like scenes and controlled prediction perturbations
"""

import logging
import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .annotations import AnnotationSet, PolygonInstance, mask_to_rings, serialize_annotations, serialize_rle_instances
from .image_io import save_pgm
from .masks import Instance, dilate, erode
from .rng import SplitMix64
from .schemas import PerturbSpec, SceneConfig

logger = logging.getLogger(__name__)

# neurites are drawn as three jittered segments
NEURITE_SEGMENTS = 3
NEURITE_JITTER = 0.35  # radians
NEURITE_DIMMING = 0.75
SPURIOUS_RADIUS_RANGE = (1, 3)


class SceneError(RuntimeError):
    """Raised when the requested cells cannot be placed"""

    def __init__(self, requested: int, achieved: int, attempts: int):
        self.requested = requested
        self.achieved = achieved
        super().__init__(
            f"placed {achieved} of {requested} cells before exhausting {attempts} attempts for the next one"
        )


def _grid(height: int, width: int) -> Tuple[np.ndarray, np.ndarray]:
    ys = np.arange(height, dtype=np.float64)[:, None] + 0.5
    xs = np.arange(width, dtype=np.float64)[None, :] + 0.5
    return ys, xs


def _ellipse(ys: np.ndarray, xs: np.ndarray, cx: float, cy: float, rx: float, ry: float) -> np.ndarray:
    return ((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2 <= 1.0


def _thick_segment(ys: np.ndarray, xs: np.ndarray, p0: Tuple[float, float], p1: Tuple[float, float], half: float) -> np.ndarray:
    (x0, y0), (x1, y1) = p0, p1
    dx, dy = x1 - x0, y1 - y0
    length_sq = dx * dx + dy * dy
    if length_sq == 0:
        t = np.zeros_like(xs + ys)
    else:
        t = np.clip(((xs - x0) * dx + (ys - y0) * dy) / length_sq, 0.0, 1.0)
    dist_sq = (xs - (x0 + t * dx)) ** 2 + (ys - (y0 + t * dy)) ** 2
    return dist_sq <= half * half


def _draw_cell(cfg: SceneConfig, rng: SplitMix64, ys: np.ndarray, xs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Sample one cell; returns (soma mask, full cell mask)"""
    r_lo, r_hi = cfg.soma_radius_range
    rx = rng.uniform_range(r_lo, r_hi)
    ry = rng.uniform_range(r_lo, r_hi)
    margin = max(rx, ry)
    cx = rng.uniform_range(margin, cfg.width - margin)
    cy = rng.uniform_range(margin, cfg.height - margin)
    soma = _ellipse(ys, xs, cx, cy, rx, ry)

    cell = soma.copy()
    half = cfg.neurite_thickness / 2.0
    for _ in range(rng.randint(*cfg.neurites_per_cell)):
        angle = rng.uniform_range(0.0, 2.0 * math.pi)
        seg_len = rng.uniform_range(*cfg.neurite_length_range) / NEURITE_SEGMENTS
        x, y = cx, cy
        for _ in range(NEURITE_SEGMENTS):
            angle += rng.uniform_range(-NEURITE_JITTER, NEURITE_JITTER)
            nx, ny = x + seg_len * math.cos(angle), y + seg_len * math.sin(angle)
            cell |= _thick_segment(ys, xs, (x, y), (nx, ny), half)
            x, y = nx, ny
    return soma, cell


def generate_scene(cfg: SceneConfig) -> Tuple[np.ndarray, List[Instance]]:
    """Render a scene and its pairwise-disjoint ground-truth instances.

    Each cell is a filled ellipse soma plus thick polyline neurites. Somas
    never touch existing cells; neurites may cross earlier cells, which lose
    the occluded pixels. A candidate that would erase half or more of an
    earlier cell is redrawn. Deterministic given cfg.seed.
    """
    rng = SplitMix64(cfg.seed)
    ys, xs = _grid(cfg.height, cfg.width)
    occupied = np.zeros((cfg.height, cfg.width), dtype=bool)
    masks: List[np.ndarray] = []
    levels = np.full((cfg.height, cfg.width), cfg.background_level, dtype=np.int64)

    for index in range(cfg.n_cells):
        blocked = dilate(occupied, 1)
        for _ in range(cfg.max_attempts):
            soma, cell = _draw_cell(cfg, rng, ys, xs)
            if not soma.any() or (soma & blocked).any():
                continue
            if any(np.count_nonzero(m & cell) * 2 >= np.count_nonzero(m) for m in masks):
                continue
            break
        else:
            raise SceneError(cfg.n_cells, index, cfg.max_attempts)

        for m in masks:
            m &= ~cell
        masks.append(cell)
        occupied |= cell

        level = rng.randint(*cfg.foreground_intensity_range)
        levels[cell] = math.floor(level * NEURITE_DIMMING + 0.5)
        levels[soma] = level

    amplitude = cfg.noise_amplitude
    noise = rng.randint_array(cfg.width * cfg.height, -amplitude, amplitude).reshape(cfg.height, cfg.width)
    image = np.clip(levels + noise, 0, 255).astype(np.uint8)

    instances = [Instance.from_mask(i, m) for i, m in enumerate(masks, start=1)]
    logger.debug(f"Generated scene seed={cfg.seed}: {len(instances)} cells")
    return image, instances


def _split_at_midline(mask: np.ndarray, bbox_x: int, bbox_y: int, bbox_w: int, bbox_h: int) -> List[np.ndarray]:
    first = np.zeros_like(mask)
    if bbox_w >= bbox_h:
        cut = bbox_x + bbox_w // 2
        first[:, :cut] = True
    else:
        cut = bbox_y + bbox_h // 2
        first[:cut, :] = True
    halves = [mask & first, mask & ~first]
    return [h for h in halves if h.any()]


def _spurious_blob(rng: SplitMix64, width: int, height: int) -> np.ndarray:
    radius = rng.randint(*SPURIOUS_RADIUS_RANGE)
    cx = rng.randint(radius, width - radius - 1)
    cy = rng.randint(radius, height - radius - 1)
    ys, xs = _grid(height, width)
    return _ellipse(ys, xs, cx + 0.5, cy + 0.5, radius + 0.5, radius + 0.5)


def perturb(
    gt: Sequence[Instance], spec: PerturbSpec, shape: Optional[Tuple[int, int]] = None
) -> List[Instance]:
    """Fake a prediction from ground truth.

    Per instance, in order: drop with drop_prob; else dilate or erode by the
    configured radius (square element); then with split_prob cut it at the
    bounding-box midline into two halves. spurious_count blobs are appended.
    Output ids run from 1 in output order. `shape` (height, width) sizes the
    spurious blobs when gt is empty.
    """
    rng = SplitMix64(spec.seed)
    masks: List[np.ndarray] = []
    for inst in gt:
        if rng.uniform() < spec.drop_prob:
            continue
        mask = inst.mask
        if spec.dilate_px:
            mask = dilate(mask, spec.dilate_px)
        elif spec.erode_px:
            mask = erode(mask, spec.erode_px)
        if not mask.any():
            logger.debug(f"Instance {inst.id} eroded away")
            continue
        if rng.uniform() < spec.split_prob:
            rows = np.flatnonzero(mask.any(axis=1))
            cols = np.flatnonzero(mask.any(axis=0))
            masks.extend(
                _split_at_midline(mask, cols[0], rows[0], cols[-1] - cols[0] + 1, rows[-1] - rows[0] + 1)
            )
        else:
            masks.append(mask)

    if spec.spurious_count:
        if gt:
            shape = gt[0].mask.shape
        if shape is None:
            logger.warning("No canvas size for spurious blobs; none added")
        else:
            height, width = shape
            for _ in range(spec.spurious_count):
                masks.append(_spurious_blob(rng, width, height))

    return [Instance.from_mask(i, m) for i, m in enumerate(masks, start=1)]


def export_scene(
    out_dir: Union[str, Path],
    scene_id: str,
    image: np.ndarray,
    gt: Sequence[Instance],
    pred: Sequence[Instance],
) -> None:
    """Write images/<id>.pgm, gt/<id>.json (polygons) and pred/<id>.json (RLE)"""
    out_dir = Path(out_dir)
    height, width = image.shape
    save_pgm(out_dir / "images" / f"{scene_id}.pgm", image)

    annotation_set = AnnotationSet(
        width,
        height,
        [PolygonInstance(inst.id, "neuron", mask_to_rings(inst.mask)) for inst in gt],
    )
    gt_path = out_dir / "gt" / f"{scene_id}.json"
    gt_path.parent.mkdir(parents=True, exist_ok=True)
    gt_path.write_text(serialize_annotations(annotation_set), encoding="utf-8")

    pred_path = out_dir / "pred" / f"{scene_id}.json"
    pred_path.parent.mkdir(parents=True, exist_ok=True)
    pred_path.write_text(serialize_rle_instances(pred, width, height), encoding="utf-8")
