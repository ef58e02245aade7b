"""Pure-Python versions of the hot loops in ``_ckernels.pyx``.

Same signatures and results as the compiled module; used when the extension
is not built.
"""
from bisect import bisect_right
import math

import numpy as np


def pa_eval_frac(xs, vf, vi, r):
    """Evaluate at ``r`` in ``[xs[0], xs[-1])``; returns ``(t, m)`` with ``f(r) = t + m``.

    Values are stored as fractional part ``vf`` plus integer part ``vi`` so
    that hitting a breakpoint reproduces its fractional value bit for bit.
    """
    i = bisect_right(xs, r) - 1
    if i >= len(xs) - 1:
        i = len(xs) - 2
    x0 = xs[i]
    x1 = xs[i + 1]
    dv = (vf[i + 1] - vf[i]) + (vi[i + 1] - vi[i])
    return vf[i] + dv * (r - x0) / (x1 - x0), vi[i]


def pa_iterate(xs, vf, vi, x, n):
    """Iterate a piecewise-affine lift ``n`` times from ``x``.

    Returns ``(r, k)`` with ``f^n(x) = r + k``, ``r`` in ``[xs[0], xs[0]+1)``
    and ``k`` an integer, so long orbits do not lose the fractional part.
    """
    xs = [float(t) for t in xs]
    vf = [float(t) for t in vf]
    vi = [int(t) for t in vi]
    base = xs[0]
    k = math.floor(x - base)
    r = x - k
    for _ in range(int(n)):
        t, m = pa_eval_frac(xs, vf, vi, r)
        j = math.floor(t - base)
        k += m + j
        r = t - j
    return r, int(k)


def pa_iterate_many(xs, vf, vi, x, n):
    x = np.asarray(x, dtype=float)
    r = np.empty_like(x)
    k = np.empty(x.shape, dtype=np.int64)
    for idx, x0 in np.ndenumerate(x):
        r[idx], k[idx] = pa_iterate(xs, vf, vi, float(x0), n)
    return r, k


def draw_polyline(img, px, py, value=1):
    """Mark every pixel crossed by the polyline (px, py) in ``img``."""
    px = np.asarray(px, dtype=float)
    py = np.asarray(py, dtype=float)
    if px.size == 0:
        return img
    h, w = img.shape
    if px.size == 1:
        cols, rows = px, py
    else:
        seg = np.hypot(np.diff(px), np.diff(py))
        steps = np.maximum(np.ceil(seg * 2).astype(np.int64), 1)
        idx = np.repeat(np.arange(seg.size), steps)
        offs = np.arange(idx.size) - np.repeat(np.cumsum(steps) - steps, steps)
        t = offs / np.repeat(steps, steps)
        cols = np.concatenate([px[idx] + t * (px[idx + 1] - px[idx]), px[-1:]])
        rows = np.concatenate([py[idx] + t * (py[idx + 1] - py[idx]), py[-1:]])
    ci = np.floor(cols).astype(np.int64)
    ri = np.floor(rows).astype(np.int64)
    ok = (ci >= 0) & (ci < w) & (ri >= 0) & (ri < h)
    img[ri[ok], ci[ok]] = value
    return img
