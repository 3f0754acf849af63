"""Vectorized NumPy implementations of the hot per-pixel kernels.

Every function here has a numba twin in ``numba_impl`` with bit-identical
output; the arithmetic below is written to mirror the loop versions
expression-for-expression (same float64 intermediates, same half-up
rounding, same tie-break order) so either backend can be swapped in
without changing results.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

# Elements of the (chunk, k) distance matrix to materialize at once in
# assign_labels before falling back to chunking.
_ASSIGN_CHUNK_BUDGET = 4_000_000


def rgb_to_hsv_u8(rgb: np.ndarray) -> np.ndarray:
    """Hexcone RGB -> HSV, hue on 0-179 (half degrees), S/V on 0-255."""
    r = rgb[..., 0].astype(np.float64)
    g = rgb[..., 1].astype(np.float64)
    b = rgb[..., 2].astype(np.float64)

    v = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    c = v - mn

    s = np.zeros_like(v)
    nz = v > 0.0
    s[nz] = np.floor(255.0 * c[nz] / v[nz] + 0.5)

    ang = np.zeros_like(v)
    chroma = c > 0.0
    is_r = chroma & (v == r)
    is_g = chroma & ~is_r & (v == g)
    is_b = chroma & ~is_r & ~is_g
    ang[is_r] = 60.0 * (g[is_r] - b[is_r]) / c[is_r]
    ang[is_g] = 60.0 * (b[is_g] - r[is_g]) / c[is_g] + 120.0
    ang[is_b] = 60.0 * (r[is_b] - g[is_b]) / c[is_b] + 240.0
    ang[ang < 0.0] += 360.0

    h = np.floor(ang / 2.0 + 0.5)
    h[h >= 180.0] -= 180.0

    out = np.empty(rgb.shape, np.uint8)
    out[..., 0] = h.astype(np.uint8)
    out[..., 1] = s.astype(np.uint8)
    out[..., 2] = v.astype(np.uint8)
    return out


def hsv_to_rgb_u8(hsv: np.ndarray) -> np.ndarray:
    """Inverse hexcone HSV -> RGB on the same integer lattice conventions."""
    h = hsv[..., 0].astype(np.float64)
    s = hsv[..., 1].astype(np.float64)
    v = hsv[..., 2].astype(np.float64)

    h6 = h / 30.0  # 2*h degrees / 60 -> sector position in [0, 6)
    c = v * (s / 255.0)
    x = c * (1.0 - np.abs(h6 % 2.0 - 1.0))
    m = v - c

    sector = h6.astype(np.int64)
    zeros = np.zeros_like(c)
    rp = np.choose(sector, [c, x, zeros, zeros, x, c])
    gp = np.choose(sector, [x, c, c, x, zeros, zeros])
    bp = np.choose(sector, [zeros, zeros, x, c, c, x])

    out = np.empty(hsv.shape, np.uint8)
    out[..., 0] = np.floor(rp + m + 0.5).astype(np.uint8)
    out[..., 1] = np.floor(gp + m + 0.5).astype(np.uint8)
    out[..., 2] = np.floor(bp + m + 0.5).astype(np.uint8)
    return out


def _pad_false(mask: np.ndarray, sh: int, sw: int) -> np.ndarray:
    h, w = mask.shape
    padded = np.zeros((h + sh - 1, w + sw - 1), np.bool_)
    padded[(sh - 1) // 2:(sh - 1) // 2 + h, (sw - 1) // 2:(sw - 1) // 2 + w] = mask
    return padded


def erode(mask: np.ndarray, off_y: np.ndarray, off_x: np.ndarray,
          sh: int, sw: int) -> np.ndarray:
    """Binary erosion; out-of-bounds neighbors count as False.

    ``off_y``/``off_x`` are the structuring element's true-cell offsets
    relative to its center.
    """
    h, w = mask.shape
    padded = _pad_false(mask, sh, sw)
    cy, cx = (sh - 1) // 2, (sw - 1) // 2
    out = np.ones((h, w), np.bool_)
    for t in range(off_y.shape[0]):
        i, j = cy + off_y[t], cx + off_x[t]
        out &= padded[i:i + h, j:j + w]
    return out


def dilate(mask: np.ndarray, off_y: np.ndarray, off_x: np.ndarray,
           sh: int, sw: int) -> np.ndarray:
    """Binary dilation: stamp of the element at every true pixel."""
    h, w = mask.shape
    padded = _pad_false(mask, sh, sw)
    cy, cx = (sh - 1) // 2, (sw - 1) // 2
    out = np.zeros((h, w), np.bool_)
    for t in range(off_y.shape[0]):
        # reflected offsets: out(p) is true iff mask(p - offset) is true
        i, j = cy - off_y[t], cx - off_x[t]
        out |= padded[i:i + h, j:j + w]
    return out


def assign_labels(feats: np.ndarray, cents: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-centroid assignment.

    Returns (labels int32, squared distance to the assigned centroid
    float64). Ties go to the lowest centroid index.
    """
    n = feats.shape[0]
    k = cents.shape[0]
    labels = np.empty(n, np.int32)
    dists = np.empty(n, np.float64)
    step = max(1, _ASSIGN_CHUNK_BUDGET // max(k, 1))
    for s in range(0, n, step):
        f = feats[s:s + step].astype(np.float64)
        d0 = f[:, 0, None] - cents[None, :, 0]
        d1 = f[:, 1, None] - cents[None, :, 1]
        d2 = f[:, 2, None] - cents[None, :, 2]
        dd = (d0 * d0 + d1 * d1) + d2 * d2
        lab = np.argmin(dd, axis=1)
        labels[s:s + step] = lab.astype(np.int32)
        dists[s:s + step] = np.take_along_axis(dd, lab[:, None], axis=1)[:, 0]
    return labels, dists


_EIGHT_CONN = np.ones((3, 3), np.int32)


def label_components(mask: np.ndarray) -> tuple[np.ndarray, int]:
    """8-connected component labeling.

    Labels are 1..n, ordered by each component's first pixel in row-major
    scan order; background is 0.
    """
    labels, n = ndimage.label(mask, structure=_EIGHT_CONN)
    labels = labels.astype(np.int32)
    if n == 0:
        return labels, 0
    flat = labels.ravel()
    fg = np.flatnonzero(flat)
    first = np.full(n + 1, flat.size, np.int64)
    np.minimum.at(first, flat[fg], fg)
    order = np.argsort(first[1:], kind="stable")
    remap = np.empty(n + 1, np.int32)
    remap[0] = 0
    remap[order + 1] = np.arange(1, n + 1, dtype=np.int32)
    return remap[labels], n


# Clockwise 8-neighborhood starting east, y increasing downward.
_DY = np.array([0, 1, 1, 1, 0, -1, -1, -1], np.int64)
_DX = np.array([1, 1, 0, -1, -1, -1, 0, 1], np.int64)


def trace_boundary(labels: np.ndarray, target: int, sy: int, sx: int) -> np.ndarray:
    """Moore border following around one labeled component.

    ``(sy, sx)`` must be the component's first pixel in raster order (so
    its N/NW/NE/W neighbors are guaranteed off-component). Returns the
    closed outer boundary as an (m, 2) array of (y, x), first point at the
    start pixel; pixels may repeat where the border pinches.
    """
    h, w = labels.shape
    first_dir = -1
    for t in range(8):
        d = (5 + t) % 8  # backtrack is west; scan clockwise from northwest
        ny, nx = sy + _DY[d], sx + _DX[d]
        if 0 <= ny < h and 0 <= nx < w and labels[ny, nx] == target:
            first_dir = d
            break
    if first_dir < 0:
        return np.array([[sy, sx]], np.int32)

    pts = [(sy, sx)]
    cy, cx = sy, sx
    exit_dir = first_dir
    max_steps = 8 * h * w + 8  # safety valve; the trace must close before this
    for _ in range(max_steps):
        cy += _DY[exit_dir]
        cx += _DX[exit_dir]
        scan = (exit_dir + 5) % 8  # one past the backtrack direction
        next_dir = -1
        for t in range(8):
            d = (scan + t) % 8
            ny, nx = cy + _DY[d], cx + _DX[d]
            if 0 <= ny < h and 0 <= nx < w and labels[ny, nx] == target:
                next_dir = d
                break
        if cy == sy and cx == sx and next_dir == first_dir:
            break
        pts.append((cy, cx))
        exit_dir = next_dir
    return np.array(pts, np.int32)
