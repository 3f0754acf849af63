"""RGB to HSV conversion on the 8-bit scale used by the pipeline.

The hexcone model: value is the channel maximum, saturation the chroma
relative to value, and hue the angle around the color wheel computed from
whichever channel dominates. Hue is stored in half degrees (0-179) so the
full wheel fits in a byte; 360 degrees aliases onto 0-180 and values of
exactly 180 wrap back to 0.

Scalar and whole-image forms share the same arithmetic; the image form
runs through the active kernel backend.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from wiltscan import kernels
from wiltscan.errors import InvalidColorspaceError
from wiltscan.image import HSV, RGB, RasterImage


class HsvPixel(NamedTuple):
    h: int  # 0..179, half degrees
    s: int  # 0..255
    v: int  # 0..255


def rgb_to_hsv_pixel(r: int, g: int, b: int) -> HsvPixel:
    """Convert one 8-bit RGB triple.

    Ties in the channel maximum resolve red first, then green; rounding
    is half away from zero, matching the image kernels bit for bit.
    """
    for name, ch in (("r", r), ("g", g), ("b", b)):
        if not 0 <= ch <= 255:
            raise ValueError(f"channel {name}={ch} outside 0..255")
    v = max(r, g, b)
    mn = min(r, g, b)
    c = v - mn
    if v == 0:
        s = 0
    else:
        s = math.floor(255.0 * c / v + 0.5)
    if c == 0:
        ang = 0.0
    elif v == r:
        ang = 60.0 * (g - b) / c
    elif v == g:
        ang = 60.0 * (b - r) / c + 120.0
    else:
        ang = 60.0 * (r - g) / c + 240.0
    if ang < 0.0:
        ang += 360.0
    h = math.floor(ang / 2.0 + 0.5)
    if h >= 180:
        h -= 180
    return HsvPixel(h, s, v)


def rgb_to_hsv_image(img: RasterImage) -> RasterImage:
    """Convert a whole RGB image; raises if the image is already HSV."""
    if img.colorspace != RGB:
        raise InvalidColorspaceError("image is not RGB")
    hsv = kernels.rgb_to_hsv_u8(np.asarray(img.pixels))
    return RasterImage(hsv, HSV)


def hsv_to_rgb_image(img: RasterImage) -> RasterImage:
    """Inverse conversion; exact for triples produced by rgb_to_hsv_image
    only when chroma information was not collapsed (see tests for the
    round-trip tolerance)."""
    if img.colorspace != HSV:
        raise InvalidColorspaceError("image is not HSV")
    rgb = kernels.hsv_to_rgb_u8(np.asarray(img.pixels))
    return RasterImage(rgb, RGB)


def normalize_hsv_values(hsv: np.ndarray) -> np.ndarray:
    """Scale 8-bit HSV channels onto the unit cube as float32.

    Hue divides by 179 and saturation/value by 255 so each axis spans
    exactly [0, 1]; clustering distances then weigh the channels evenly.
    """
    arr = np.asarray(hsv, dtype=np.float32)
    return arr / np.array([179.0, 255.0, 255.0], dtype=np.float32)


def normalize_hsv(img: RasterImage) -> np.ndarray:
    """Flatten an HSV image to an (H*W, 3) float32 feature matrix,
    row-major pixel order."""
    if img.colorspace != HSV:
        raise InvalidColorspaceError("image is not HSV")
    flat = np.asarray(img.pixels).reshape(-1, 3)
    return normalize_hsv_values(flat)
