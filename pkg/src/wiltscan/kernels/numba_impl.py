"""numba @njit implementations of the hot per-pixel kernels.

Loop twins of ``numpy_impl``: every expression is kept in the same order
and precision as the vectorized versions so both backends produce
bit-identical arrays.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def rgb_to_hsv_u8(rgb):
    h, w = rgb.shape[0], rgb.shape[1]
    out = np.empty((h, w, 3), np.uint8)
    for y in range(h):
        for x in range(w):
            r = float(rgb[y, x, 0])
            g = float(rgb[y, x, 1])
            b = float(rgb[y, x, 2])
            v = max(r, g, b)
            mn = min(r, g, b)
            c = v - mn
            if v > 0.0:
                s = np.floor(255.0 * c / v + 0.5)
            else:
                s = 0.0
            ang = 0.0
            if c > 0.0:
                if v == r:
                    ang = 60.0 * (g - b) / c
                elif v == g:
                    ang = 60.0 * (b - r) / c + 120.0
                else:
                    ang = 60.0 * (r - g) / c + 240.0
                if ang < 0.0:
                    ang += 360.0
            hh = np.floor(ang / 2.0 + 0.5)
            if hh >= 180.0:
                hh -= 180.0
            out[y, x, 0] = np.uint8(hh)
            out[y, x, 1] = np.uint8(s)
            out[y, x, 2] = np.uint8(v)
    return out


@njit(cache=True)
def hsv_to_rgb_u8(hsv):
    h, w = hsv.shape[0], hsv.shape[1]
    out = np.empty((h, w, 3), np.uint8)
    for y in range(h):
        for x in range(w):
            hv = float(hsv[y, x, 0])
            s = float(hsv[y, x, 1])
            v = float(hsv[y, x, 2])
            h6 = hv / 30.0
            c = v * (s / 255.0)
            xx = c * (1.0 - abs(h6 % 2.0 - 1.0))
            m = v - c
            sector = int(h6)
            if sector == 0:
                rp, gp, bp = c, xx, 0.0
            elif sector == 1:
                rp, gp, bp = xx, c, 0.0
            elif sector == 2:
                rp, gp, bp = 0.0, c, xx
            elif sector == 3:
                rp, gp, bp = 0.0, xx, c
            elif sector == 4:
                rp, gp, bp = xx, 0.0, c
            else:
                rp, gp, bp = c, 0.0, xx
            out[y, x, 0] = np.uint8(np.floor(rp + m + 0.5))
            out[y, x, 1] = np.uint8(np.floor(gp + m + 0.5))
            out[y, x, 2] = np.uint8(np.floor(bp + m + 0.5))
    return out


@njit(cache=True)
def erode(mask, off_y, off_x, sh, sw):
    h, w = mask.shape
    out = np.empty((h, w), np.bool_)
    n = off_y.shape[0]
    for y in range(h):
        for x in range(w):
            ok = True
            for t in range(n):
                yy = y + off_y[t]
                xx = x + off_x[t]
                if yy < 0 or yy >= h or xx < 0 or xx >= w or not mask[yy, xx]:
                    ok = False
                    break
            out[y, x] = ok
    return out


@njit(cache=True)
def dilate(mask, off_y, off_x, sh, sw):
    h, w = mask.shape
    out = np.empty((h, w), np.bool_)
    n = off_y.shape[0]
    for y in range(h):
        for x in range(w):
            hit = False
            for t in range(n):
                yy = y - off_y[t]
                xx = x - off_x[t]
                if 0 <= yy < h and 0 <= xx < w and mask[yy, xx]:
                    hit = True
                    break
            out[y, x] = hit
    return out


@njit(cache=True)
def assign_labels(feats, cents):
    n = feats.shape[0]
    k = cents.shape[0]
    labels = np.empty(n, np.int32)
    dists = np.empty(n, np.float64)
    for i in range(n):
        f0 = float(feats[i, 0])
        f1 = float(feats[i, 1])
        f2 = float(feats[i, 2])
        best = 0
        bd = np.inf
        for j in range(k):
            d0 = f0 - cents[j, 0]
            d1 = f1 - cents[j, 1]
            d2 = f2 - cents[j, 2]
            dd = (d0 * d0 + d1 * d1) + d2 * d2
            if dd < bd:
                bd = dd
                best = j
        labels[i] = best
        dists[i] = bd
    return labels, dists


@njit(cache=True)
def label_components(mask):
    h, w = mask.shape
    labels = np.zeros((h, w), np.int32)
    queue = np.empty(h * w, np.int64)
    count = 0
    for y0 in range(h):
        for x0 in range(w):
            if mask[y0, x0] and labels[y0, x0] == 0:
                count += 1
                head = 0
                tail = 0
                labels[y0, x0] = count
                queue[tail] = y0 * w + x0
                tail += 1
                while head < tail:
                    p = queue[head]
                    head += 1
                    py = p // w
                    px = p % w
                    for dy in range(-1, 2):
                        for dx in range(-1, 2):
                            ny = py + dy
                            nx = px + dx
                            if (0 <= ny < h and 0 <= nx < w
                                    and mask[ny, nx] and labels[ny, nx] == 0):
                                labels[ny, nx] = count
                                queue[tail] = ny * w + nx
                                tail += 1
    return labels, count


@njit(cache=True)
def trace_boundary(labels, target, sy, sx):
    # clockwise 8-neighborhood starting east, y increasing downward
    dy = np.array([0, 1, 1, 1, 0, -1, -1, -1], np.int64)
    dx = np.array([1, 1, 0, -1, -1, -1, 0, 1], np.int64)
    h, w = labels.shape

    first_dir = -1
    for t in range(8):
        d = (5 + t) % 8  # backtrack is west; scan clockwise from northwest
        ny = sy + dy[d]
        nx = sx + dx[d]
        if 0 <= ny < h and 0 <= nx < w and labels[ny, nx] == target:
            first_dir = d
            break
    out = np.empty((16, 2), np.int32)
    out[0, 0] = sy
    out[0, 1] = sx
    if first_dir < 0:
        return out[:1].copy()

    m = 1
    cy, cx = sy, sx
    exit_dir = first_dir
    max_steps = 8 * h * w + 8  # safety valve; the trace must close before this
    for _ in range(max_steps):
        cy += dy[exit_dir]
        cx += dx[exit_dir]
        scan = (exit_dir + 5) % 8  # one past the backtrack direction
        next_dir = -1
        for t in range(8):
            d = (scan + t) % 8
            ny = cy + dy[d]
            nx = cx + dx[d]
            if 0 <= ny < h and 0 <= nx < w and labels[ny, nx] == target:
                next_dir = d
                break
        if cy == sy and cx == sx and next_dir == first_dir:
            break
        if m == out.shape[0]:
            grown = np.empty((out.shape[0] * 2, 2), np.int32)
            grown[:m] = out
            out = grown
        out[m, 0] = cy
        out[m, 1] = cx
        m += 1
        exit_dir = next_dir
    return out[:m].copy()
