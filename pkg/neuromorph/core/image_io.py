"""
Raster loading, intensity normalisation and resizing
"""

import logging
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
import png

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

RESIZE_MODES = ["bilinear", "nearest"]

# ITU-R BT.601 luma weights
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


class ImageFormatError(ValueError):
    """Raised when an image file cannot be decoded"""

    def __init__(self, path: PathLike, reason: str):
        self.path = str(path)
        self.reason = reason
        super().__init__(f"{self.path}: {reason}")


@dataclass(frozen=True)
class RawImage:
    """Decoded single-channel raster at its native bit depth"""

    samples: np.ndarray  # (height, width) integer intensities
    bit_depth: int

    def __post_init__(self) -> None:
        if self.samples.ndim != 2:
            raise ValueError(f"samples must be 2-D, got shape {self.samples.shape}")
        if self.bit_depth not in (8, 16):
            raise ValueError(f"bit_depth must be 8 or 16, got {self.bit_depth}")
        if self.samples.size and int(self.samples.max()) >= 1 << self.bit_depth:
            raise ValueError(f"sample exceeds {self.bit_depth}-bit range")

    @property
    def width(self) -> int:
        return int(self.samples.shape[1])

    @property
    def height(self) -> int:
        return int(self.samples.shape[0])


def round_half_away(values: np.ndarray) -> np.ndarray:
    """Round to nearest integer, ties away from zero"""
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


def load_grayscale(path: PathLike) -> RawImage:
    """Load a PGM (P2/P5) or PNG file as a single-channel raster.

    Colour PNGs are reduced with luma = round(0.299R + 0.587G + 0.114B).
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Image file not found: {path}")
    try:
        data = path.read_bytes()
    except OSError as e:
        raise ImageFormatError(path, f"unreadable file ({e})") from e

    if data[:2] in (b"P2", b"P5"):
        return _decode_pgm(path, data)
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return _decode_png(path, data)
    raise ImageFormatError(path, "unsupported format (expected PGM P2/P5 or PNG)")


def _pgm_tokens(data: bytes, count: int, path: Path) -> Tuple[List[bytes], int]:
    """Read `count` whitespace-separated header tokens, skipping comments"""
    tokens: List[bytes] = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise ImageFormatError(path, "truncated header")
        if data[pos:pos + 1] == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos


def _decode_pgm(path: Path, data: bytes) -> RawImage:
    tokens, pos = _pgm_tokens(data, 4, path)
    magic = tokens[0]
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ImageFormatError(path, "non-numeric header field")
    if width < 1 or height < 1:
        raise ImageFormatError(path, f"invalid dimensions {width}x{height}")
    if not 0 < maxval <= 65535:
        raise ImageFormatError(path, f"maxval {maxval} outside 1..65535")

    n = width * height
    if magic == b"P2":
        fields = data[pos:].split()
        if len(fields) < n:
            raise ImageFormatError(path, f"truncated data: {len(fields)} of {n} samples")
        try:
            samples = np.array([int(f) for f in fields[:n]], dtype=np.int64)
        except ValueError:
            raise ImageFormatError(path, "non-numeric sample")
    else:
        # exactly one whitespace byte separates maxval from the raster
        raster = data[pos + 1:]
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        needed = n * dtype.itemsize
        if len(raster) < needed:
            raise ImageFormatError(path, f"truncated data: {len(raster)} of {needed} bytes")
        samples = np.frombuffer(raster[:needed], dtype=dtype).astype(np.int64)

    if samples.size and int(samples.max()) > maxval:
        raise ImageFormatError(path, f"sample exceeds maxval {maxval}")
    bit_depth = 8 if maxval <= 255 else 16
    dtype_out = np.uint8 if bit_depth == 8 else np.uint16
    return RawImage(samples.reshape(height, width).astype(dtype_out), bit_depth)


def _decode_png(path: Path, data: bytes) -> RawImage:
    try:
        width, height, rows, info = png.Reader(bytes=data).asDirect()
        pixels = np.array([np.asarray(row, dtype=np.int64) for row in rows])
    except (png.Error, EOFError, zlib.error) as e:
        raise ImageFormatError(path, f"invalid PNG ({e})") from e

    planes = info["planes"]
    if pixels.shape != (height, width * planes):
        raise ImageFormatError(path, "truncated data")
    pixels = pixels.reshape(height, width, planes)
    if info.get("alpha"):
        pixels = pixels[..., :-1]

    if pixels.shape[2] == 1:
        gray = pixels[..., 0]
    else:
        weighted = (pixels[..., :3].astype(np.float64) * np.array(LUMA_WEIGHTS)).sum(axis=2)
        gray = round_half_away(weighted).astype(np.int64)

    bit_depth = 16 if info["bitdepth"] > 8 else 8
    dtype_out = np.uint8 if bit_depth == 8 else np.uint16
    return RawImage(gray.astype(dtype_out), bit_depth)


def normalize_to_u8(img: RawImage) -> np.ndarray:
    """Per-image linear min-max map onto [0, 255].

    p' = round(255 * (p - min) / (max - min)), ties away from zero; a constant
    image maps to all zeros.
    """
    if img.samples.size == 0:
        raise ValueError("cannot normalise an empty image")
    p = img.samples.astype(np.int64)
    lo, hi = int(p.min()), int(p.max())
    if hi == lo:
        return np.zeros(p.shape, dtype=np.uint8)
    # exact integer form of floor(255 * (p - lo) / (hi - lo) + 0.5)
    num = 255 * (p - lo)
    den = hi - lo
    return ((2 * num + den) // (2 * den)).astype(np.uint8)


def _source_coords(n_in: int, n_out: int) -> np.ndarray:
    scale = n_in / n_out
    coords = (np.arange(n_out) + 0.5) * scale - 0.5
    return np.clip(coords, 0, n_in - 1)


def resize(img: np.ndarray, out_w: int, out_h: int, mode: str = "bilinear") -> np.ndarray:
    """Resize a 2-D raster with pixel-centre alignment.

    Source coordinate = (i + 0.5) * scale - 0.5, clamped to the image bounds.
    Bilinear is meant for intensity images (output rounded ties-away, uint8);
    nearest keeps the input dtype and value set, so it is the mode for masks.
    """
    if out_w < 1 or out_h < 1:
        raise ValueError(f"target size must be at least 1x1, got {out_w}x{out_h}")
    if mode not in RESIZE_MODES:
        raise ValueError(f"unknown resize mode '{mode}', expected one of {RESIZE_MODES}")
    in_h, in_w = img.shape
    if (in_w, in_h) == (out_w, out_h):
        return img.copy()

    ys = _source_coords(in_h, out_h)
    xs = _source_coords(in_w, out_w)

    if mode == "nearest":
        yi = np.minimum(np.floor(ys + 0.5).astype(np.int64), in_h - 1)
        xi = np.minimum(np.floor(xs + 0.5).astype(np.int64), in_w - 1)
        return img[np.ix_(yi, xi)]

    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]

    src = img.astype(np.float64)
    top = src[np.ix_(y0, x0)] * (1 - fx) + src[np.ix_(y0, x1)] * fx
    bottom = src[np.ix_(y1, x0)] * (1 - fx) + src[np.ix_(y1, x1)] * fx
    out = top * (1 - fy) + bottom * fy
    return np.clip(round_half_away(out), 0, 255).astype(np.uint8)


def save_pgm(path: PathLike, raster: np.ndarray) -> None:
    """Write an 8-bit binary PGM; boolean masks are written as 0/255"""
    if raster.dtype == bool:
        raster = raster.astype(np.uint8) * 255
    if raster.dtype != np.uint8:
        raise ValueError(f"save_pgm expects uint8 or bool, got {raster.dtype}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    height, width = raster.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    path.write_bytes(header + np.ascontiguousarray(raster).tobytes())


def save_png_rgb(path: PathLike, rgb: np.ndarray) -> None:
    """Write an (H, W, 3) uint8 array as an 8-bit RGB PNG"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    height, width, _ = rgb.shape
    writer = png.Writer(width, height, greyscale=False, bitdepth=8)
    with open(path, "wb") as f:
        writer.write(f, rgb.reshape(height, width * 3).tolist())
