"""Independent reference implementations used to judge the package.

Everything here is deliberately written in the slowest, most obvious way
available, sharing no code with the package: exact rational arithmetic
for the colorspace, double loops for morphology, breadth-first flood
fill for labeling. If the fast paths and these disagree, the fast paths
are wrong.
"""

from __future__ import annotations

import math
from fractions import Fraction


def hsv_reference(r: int, g: int, b: int) -> tuple[int, int, int]:
    """Hexcone RGB -> HSV on the 8-bit lattice, in exact rationals.

    Value is the channel maximum. Saturation is 255 * chroma / value,
    rounded half up. Hue is the sextant angle in degrees, halved onto
    0..179, rounded half up, with 180 wrapping to 0. Rationals make the
    half-up rounding unambiguous at every boundary.
    """
    v = max(r, g, b)
    mn = min(r, g, b)
    c = v - mn
    s = 0 if v == 0 else math.floor(Fraction(255 * c, v) + Fraction(1, 2))
    if c == 0:
        angle = Fraction(0)
    elif v == r:
        angle = Fraction(60 * (g - b), c)
    elif v == g:
        angle = Fraction(60 * (b - r), c) + 120
    else:
        angle = Fraction(60 * (r - g), c) + 240
    if angle < 0:
        angle += 360
    h = math.floor(angle / 2 + Fraction(1, 2))
    if h >= 180:
        h -= 180
    return h, s, v


def erode_reference(mask, se_bits, anchor_y, anchor_x):
    """Double-loop erosion; outside the frame counts as background."""
    h = len(mask)
    w = len(mask[0])
    sh = len(se_bits)
    sw = len(se_bits[0])
    out = [[False] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            keep = True
            for i in range(sh):
                for j in range(sw):
                    if not se_bits[i][j]:
                        continue
                    yy = y + i - anchor_y
                    xx = x + j - anchor_x
                    if not (0 <= yy < h and 0 <= xx < w) or not mask[yy][xx]:
                        keep = False
                        break
                if not keep:
                    break
            out[y][x] = keep
    return out


def dilate_reference(mask, se_bits, anchor_y, anchor_x):
    """Double-loop dilation with the reflected element; outside the frame
    counts as background."""
    h = len(mask)
    w = len(mask[0])
    sh = len(se_bits)
    sw = len(se_bits[0])
    out = [[False] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            hit = False
            for i in range(sh):
                for j in range(sw):
                    if not se_bits[i][j]:
                        continue
                    yy = y - (i - anchor_y)
                    xx = x - (j - anchor_x)
                    if 0 <= yy < h and 0 <= xx < w and mask[yy][xx]:
                        hit = True
                        break
                if hit:
                    break
            out[y][x] = hit
    return out


def flood_fill_components(mask) -> list[set[tuple[int, int]]]:
    """8-connected components by breadth-first flood fill.

    Returned in raster order of each component's first-encountered pixel,
    as sets of (y, x) coordinates.
    """
    h = len(mask)
    w = len(mask[0])
    seen = [[False] * w for _ in range(h)]
    components: list[set[tuple[int, int]]] = []
    for y in range(h):
        for x in range(w):
            if not mask[y][x] or seen[y][x]:
                continue
            comp = set()
            queue = [(y, x)]
            seen[y][x] = True
            while queue:
                cy, cx = queue.pop()
                comp.add((cy, cx))
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        if dy == 0 and dx == 0:
                            continue
                        ny, nx = cy + dy, cx + dx
                        if 0 <= ny < h and 0 <= nx < w and mask[ny][nx] and not seen[ny][nx]:
                            seen[ny][nx] = True
                            queue.append((ny, nx))
            components.append(comp)
    return components


def elbow_reference(k_values, counts) -> int:
    """The elbow rule evaluated in exact rationals: score each consecutive
    step by its relative count drop (negative or undefined score is zero)
    and return the k of the first maximal step."""
    if len(k_values) == 1:
        return k_values[0]
    scores = []
    for i in range(1, len(k_values)):
        prev, cur = counts[i - 1], counts[i]
        if prev <= 0 or cur >= prev:
            scores.append(Fraction(0))
        else:
            scores.append(Fraction(prev - cur, prev))
    best = max(scores)
    return k_values[1 + scores.index(best)]


def disk_pixel_count(radius: int) -> int:
    """Lattice points at Euclidean distance <= radius from the center,
    counted one by one."""
    n = 0
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            if dx * dx + dy * dy <= radius * radius:
                n += 1
    return n
