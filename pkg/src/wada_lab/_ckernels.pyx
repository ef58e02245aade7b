# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: long lift orbits and polyline rasterization."""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor, ceil, sqrt

cnp.import_array()


cdef inline Py_ssize_t _piece(const double[:] xs, double r) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = xs.shape[0] - 1, mid
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if xs[mid] <= r:
            lo = mid
        else:
            hi = mid
    return lo


cdef (double, long long) _iterate(const double[:] xs, const double[:] vf, const long long[:] vi,
                                  double x, long long n) noexcept nogil:
    cdef double base = xs[0]
    cdef double r, t, j, dv
    cdef long long k, i
    cdef Py_ssize_t p
    k = <long long>floor(x - base)
    r = x - k
    for i in range(n):
        p = _piece(xs, r)
        dv = (vf[p + 1] - vf[p]) + <double>(vi[p + 1] - vi[p])
        t = vf[p] + dv * (r - xs[p]) / (xs[p + 1] - xs[p])
        j = floor(t - base)
        k += vi[p] + <long long>j
        r = t - j
    return r, k


def pa_iterate(xs, vf, vi, double x, long long n):
    cdef const double[:] cx = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[:] cf = np.ascontiguousarray(vf, dtype=np.float64)
    cdef const long long[:] ci = np.ascontiguousarray(vi, dtype=np.int64)
    r, k = _iterate(cx, cf, ci, x, n)
    return r, int(k)


def pa_iterate_many(xs, vf, vi, x, long long n):
    cdef const double[:] cx = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[:] cf = np.ascontiguousarray(vf, dtype=np.float64)
    cdef const long long[:] cvi = np.ascontiguousarray(vi, dtype=np.int64)
    arr = np.ascontiguousarray(x, dtype=np.float64)
    flat = arr.ravel()
    cdef const double[:] cin = flat
    r_out = np.empty(flat.shape[0], dtype=np.float64)
    k_out = np.empty(flat.shape[0], dtype=np.int64)
    cdef double[:] cr = r_out
    cdef long long[:] ck = k_out
    cdef Py_ssize_t i
    cdef double rr
    cdef long long kk
    with nogil:
        for i in range(cin.shape[0]):
            rr, kk = _iterate(cx, cf, cvi, cin[i], n)
            cr[i] = rr
            ck[i] = kk
    return r_out.reshape(arr.shape), k_out.reshape(arr.shape)


def draw_polyline(cnp.uint8_t[:, :] img, px, py, int value=1):
    cdef const double[:] cx = np.ascontiguousarray(px, dtype=np.float64)
    cdef const double[:] cy = np.ascontiguousarray(py, dtype=np.float64)
    cdef Py_ssize_t n = cx.shape[0], i, s, steps
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    cdef double x0, y0, dx, dy, t, seg
    cdef long long ci, ri
    if n == 0:
        return np.asarray(img)
    with nogil:
        for i in range(n):
            x0 = cx[i]
            y0 = cy[i]
            if i + 1 < n:
                dx = cx[i + 1] - x0
                dy = cy[i + 1] - y0
                seg = sqrt(dx * dx + dy * dy)
                steps = <Py_ssize_t>ceil(seg * 2)
                if steps < 1:
                    steps = 1
            else:
                dx = 0
                dy = 0
                steps = 1
            for s in range(steps):
                t = <double>s / steps
                ci = <long long>floor(x0 + t * dx)
                ri = <long long>floor(y0 + t * dy)
                if 0 <= ci < w and 0 <= ri < h:
                    img[ri, ci] = value
    return np.asarray(img)
