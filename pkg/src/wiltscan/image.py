"""Core raster types and lossless PNG I/O.

Conventions used everywhere in the package: row-major storage, origin at
the top-left corner, y increasing downward, x increasing to the right.
Pixel data is 8-bit per channel; HSV images keep hue on the 0-179
half-degree scale.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from wiltscan.errors import (
    CorruptDataError,
    InvalidColorspaceError,
    OutOfBoundsError,
    UnsupportedFormatError,
)

RGB = "rgb"
HSV = "hsv"

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def _readonly(arr: np.ndarray) -> np.ndarray:
    view = arr.view()
    view.flags.writeable = False
    return view


@dataclass(frozen=True)
class RasterImage:
    """H x W x 3 grid of 8-bit pixels, tagged RGB or HSV.

    The pixel buffer is exposed as a read-only view. The constructor does
    not copy a uint8 source array, so ownership transfers to the image;
    mutate a private copy instead of the original if you need both.
    """

    pixels: np.ndarray  # (height, width, 3) uint8
    colorspace: str = RGB

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"expected (H, W, 3) pixel array, got {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if self.colorspace not in (RGB, HSV):
            raise ValueError(f"unknown colorspace {self.colorspace!r}")
        if self.colorspace == HSV and px[..., 0].max(initial=0) > 179:
            raise ValueError("HSV image has hue above 179")
        object.__setattr__(self, "pixels", _readonly(px))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def pixel_at(self, x: int, y: int) -> tuple[int, int, int]:
        """Channel triple at (x, y); raises OutOfBoundsError, never wraps."""
        if not (0 <= x < self.width and 0 <= y < self.height):
            raise OutOfBoundsError(f"pixel ({x}, {y}) outside {self.width}x{self.height}")
        p = self.pixels[y, x]
        return int(p[0]), int(p[1]), int(p[2])

    def __eq__(self, other) -> bool:
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.colorspace == other.colorspace and np.array_equal(
            self.pixels, other.pixels
        )

    def __hash__(self):
        return hash((self.colorspace, self.pixels.shape))


@dataclass(frozen=True)
class BinaryMask:
    """H x W boolean grid; true marks foreground."""

    bits: np.ndarray  # (height, width) bool

    def __post_init__(self):
        b = np.asarray(self.bits)
        if b.dtype != np.bool_:
            b = b.astype(np.bool_)
        if b.ndim != 2 or b.shape[0] < 1 or b.shape[1] < 1:
            raise ValueError(f"expected non-empty (H, W) bool array, got {b.shape}")
        object.__setattr__(self, "bits", _readonly(b))

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    def popcount(self) -> int:
        return int(np.count_nonzero(self.bits))

    def get(self, x: int, y: int) -> bool:
        if not (0 <= x < self.width and 0 <= y < self.height):
            raise OutOfBoundsError(f"bit ({x}, {y}) outside {self.width}x{self.height}")
        return bool(self.bits[y, x])

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.shape)


def _check_png_header(path: Path) -> None:
    """Reject non-PNG files and PNGs that are not 8-bit RGB/RGBA.

    Pillow silently truncates 16-bit RGB to 8 bits, so bit depth and color
    type are read straight from the IHDR chunk.
    """
    with open(path, "rb") as f:
        head = f.read(33)
    if len(head) < 8 or head[:8] != _PNG_SIGNATURE:
        raise UnsupportedFormatError(f"{path}: not a PNG file")
    if len(head) < 33 or head[12:16] != b"IHDR":
        raise CorruptDataError(f"{path}: PNG missing IHDR chunk")
    bit_depth, color_type = struct.unpack(">BB", head[24:26])
    if bit_depth != 8:
        raise UnsupportedFormatError(f"{path}: {bit_depth}-bit PNG, need 8-bit")
    if color_type not in (2, 6):  # truecolor / truecolor+alpha
        raise UnsupportedFormatError(
            f"{path}: PNG color type {color_type}, need RGB or RGBA samples"
        )


def load_image(path: str | Path) -> RasterImage:
    """Load an 8-bit RGB or RGBA PNG; alpha is discarded."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    _check_png_header(path)
    try:
        with Image.open(path) as im:
            im.load()
            arr = np.asarray(im)
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise CorruptDataError(f"{path}: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] not in (3, 4):
        raise CorruptDataError(f"{path}: decoded to unexpected shape {arr.shape}")
    return RasterImage(arr[..., :3], RGB)


def save_image(img: RasterImage, path: str | Path) -> None:
    """Write a lossless PNG; only RGB-tagged images may be saved."""
    if img.colorspace != RGB:
        raise InvalidColorspaceError("convert to RGB before saving")
    Image.fromarray(np.asarray(img.pixels), mode="RGB").save(path, format="PNG")


def mask_to_image(mask: BinaryMask) -> RasterImage:
    """Render a mask as an RGB image: true -> white, false -> black."""
    px = np.zeros((mask.height, mask.width, 3), np.uint8)
    px[mask.bits] = 255
    return RasterImage(px, RGB)


def mask_to_rle(mask: BinaryMask) -> list[int]:
    """Row-major run-length encoding, alternating runs starting with false."""
    flat = mask.bits.ravel()
    changes = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate(([0], changes, [flat.size]))
    runs = np.diff(bounds).tolist()
    if flat[0]:
        runs.insert(0, 0)
    return runs


def rle_to_mask(runs: list[int], width: int, height: int) -> BinaryMask:
    """Inverse of mask_to_rle."""
    total = sum(runs)
    if total != width * height:
        raise ValueError(f"run lengths sum to {total}, expected {width * height}")
    flat = np.zeros(width * height, np.bool_)
    pos = 0
    value = False
    for run in runs:
        if value:
            flat[pos:pos + run] = True
        pos += run
        value = not value
    return BinaryMask(flat.reshape(height, width))
