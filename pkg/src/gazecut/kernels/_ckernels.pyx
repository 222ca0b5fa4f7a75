# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-pixel kernels.

Mirrors `gazecut.kernels._numpy` function for function, with the same
accumulation order, so both backends agree bit-for-bit on integer outputs
and to the last few ulps on floats.
"""

from libc.math cimport M_PI, atan2, floor, sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef double TWO_PI = 2 * M_PI
cdef double HALF_PI = M_PI / 2
cdef double THREE_HALF_PI = 3 * M_PI / 2
cdef double QUARTER_PI = M_PI / 4


cdef inline Py_ssize_t _clamp(Py_ssize_t i, Py_ssize_t n):
    if i < 0:
        return 0
    if i >= n:
        return n - 1
    return i


def smooth_separable(double[:, ::1] img, double[::1] weights):
    """Separable convolution with a symmetric 1-D kernel, replicate border."""
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1], n = weights.shape[0]
    cdef Py_ssize_t r = n // 2
    cdef Py_ssize_t i, j, t
    cdef double acc
    tmp_arr = np.empty((h, w), dtype=np.float64)
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] tmp = tmp_arr
    cdef double[:, ::1] out = out_arr
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for t in range(n):
                acc += weights[t] * img[i, _clamp(j + t - r, w)]
            tmp[i, j] = acc
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for t in range(n):
                acc += weights[t] * tmp[_clamp(i + t - r, h), j]
            out[i, j] = acc
    return out_arr


def convolve3x3(double[:, ::1] img, double[:, ::1] kernel):
    """True 2-D convolution (kernel flipped) with replicate border."""
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    cdef Py_ssize_t r, c, i, j
    cdef double acc
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for r in range(h):
        for c in range(w):
            acc = 0.0
            for i in range(3):
                for j in range(3):
                    acc += kernel[i, j] * img[_clamp(r + 1 - i, h), _clamp(c + 1 - j, w)]
            out[r, c] = acc
    return out_arr


def flow_step_literal(double[:, ::1] ex, double[:, ::1] ey, double[:, ::1] et,
                      double[:, ::1] seed_u, double[:, ::1] seed_v, double alpha):
    """Single velocity update seeded with the previous frame's flow."""
    cdef Py_ssize_t h = ex.shape[0], w = ex.shape[1]
    cdef Py_ssize_t i, j
    cdef double denom, t
    u_arr = np.empty((h, w), dtype=np.float64)
    v_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] u = u_arr
    cdef double[:, ::1] v = v_arr
    for i in range(h):
        for j in range(w):
            denom = alpha * alpha + ex[i, j] * ex[i, j] + ey[i, j] * ey[i, j]
            t = (ex[i, j] * seed_u[i, j] + ey[i, j] * seed_v[i, j] + et[i, j]) / denom
            u[i, j] = seed_u[i, j] - ex[i, j] * t
            v[i, j] = seed_v[i, j] - ey[i, j] * t
    return u_arr, v_arr


cdef void _four_avg(double[:, ::1] a, double[:, ::1] out):
    cdef Py_ssize_t h = a.shape[0], w = a.shape[1]
    cdef Py_ssize_t i, j
    for i in range(h):
        for j in range(w):
            out[i, j] = ((a[_clamp(i - 1, h), j] + a[_clamp(i + 1, h), j])
                         + (a[i, _clamp(j - 1, w)] + a[i, _clamp(j + 1, w)])) * 0.25


def flow_step_relax(double[:, ::1] ex, double[:, ::1] ey, double[:, ::1] et,
                    double[:, ::1] seed_u, double[:, ::1] seed_v,
                    double alpha, Py_ssize_t iterations):
    """Jacobi relaxation: neighbor averages on the right-hand side."""
    cdef Py_ssize_t h = ex.shape[0], w = ex.shape[1]
    cdef Py_ssize_t i, j, it
    cdef double denom, t
    u_arr = np.array(seed_u, dtype=np.float64, copy=True)
    v_arr = np.array(seed_v, dtype=np.float64, copy=True)
    ub_arr = np.empty((h, w), dtype=np.float64)
    vb_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] u = u_arr
    cdef double[:, ::1] v = v_arr
    cdef double[:, ::1] ub = ub_arr
    cdef double[:, ::1] vb = vb_arr
    for it in range(iterations):
        _four_avg(u, ub)
        _four_avg(v, vb)
        for i in range(h):
            for j in range(w):
                denom = alpha * alpha + ex[i, j] * ex[i, j] + ey[i, j] * ey[i, j]
                t = (ex[i, j] * ub[i, j] + ey[i, j] * vb[i, j] + et[i, j]) / denom
                u[i, j] = ub[i, j] - ex[i, j] * t
                v[i, j] = vb[i, j] - ey[i, j] * t
    return u_arr, v_arr


def magnitude_orientation(double[:, ::1] u, double[:, ::1] v):
    """Magnitude sqrt(u^2+v^2); orientation atan2(u, v) wrapped to [0, 2pi)."""
    cdef Py_ssize_t h = u.shape[0], w = u.shape[1]
    cdef Py_ssize_t i, j
    cdef double m, a
    mag_arr = np.empty((h, w), dtype=np.float64)
    ori_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] mag = mag_arr
    cdef double[:, ::1] ori = ori_arr
    for i in range(h):
        for j in range(w):
            m = sqrt(u[i, j] * u[i, j] + v[i, j] * v[i, j])
            mag[i, j] = m
            if m == 0:
                ori[i, j] = 0.0
            else:
                a = atan2(u[i, j], v[i, j])
                if a < 0:
                    a += TWO_PI
                ori[i, j] = a
    return mag_arr, ori_arr


def bin_plane(double[:, ::1] mag, double[:, ::1] ori):
    """Quadrant bin index 0..3 per pixel, -1 where the flow magnitude is 0."""
    cdef Py_ssize_t h = mag.shape[0], w = mag.shape[1]
    cdef Py_ssize_t i, j
    cdef signed char b
    out_arr = np.empty((h, w), dtype=np.int8)
    cdef signed char[:, ::1] out = out_arr
    for i in range(h):
        for j in range(w):
            if mag[i, j] > 0:
                b = 0
                if ori[i, j] >= HALF_PI:
                    b += 1
                if ori[i, j] >= M_PI:
                    b += 1
                if ori[i, j] >= THREE_HALF_PI:
                    b += 1
                out[i, j] = b
            else:
                out[i, j] = -1
    return out_arr


def weighted_bins(signed char[:, ::1] bins, double[:, ::1] mag):
    """Magnitude-weighted mass per orientation bin (4 values)."""
    cdef Py_ssize_t h = bins.shape[0], w = bins.shape[1]
    cdef Py_ssize_t i, j
    out_arr = np.zeros(4, dtype=np.float64)
    cdef double[::1] out = out_arr
    for i in range(h):
        for j in range(w):
            if bins[i, j] >= 0:
                out[bins[i, j]] += mag[i, j]
    return out_arr


def foreground_count(signed char[:, ::1] bins, int b0, int b1):
    """Pixels with nonzero flow whose bin is neither background bin."""
    cdef Py_ssize_t h = bins.shape[0], w = bins.shape[1]
    cdef Py_ssize_t i, j
    cdef long count = 0
    for i in range(h):
        for j in range(w):
            if bins[i, j] >= 0 and bins[i, j] != b0 and bins[i, j] != b1:
                count += 1
    return count


def nms(double[:, ::1] mag, double[:, ::1] gx, double[:, ::1] gy):
    """Non-maximum suppression along the quantized gradient direction."""
    cdef Py_ssize_t h = mag.shape[0], w = mag.shape[1]
    cdef Py_ssize_t i, j
    cdef int s
    cdef int[4] drs = [0, 1, 1, 1]
    cdef int[4] dcs = [1, 1, 0, -1]
    cdef double a, nb_neg, nb_pos
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for i in range(h):
        for j in range(w):
            a = atan2(gy[i, j], gx[i, j])
            if a < 0:
                a += M_PI
            s = (<int>floor(a / QUARTER_PI + 0.5)) % 4
            nb_neg = mag[_clamp(i - drs[s], h), _clamp(j - dcs[s], w)]
            nb_pos = mag[_clamp(i + drs[s], h), _clamp(j + dcs[s], w)]
            if mag[i, j] >= nb_neg and mag[i, j] > nb_pos:
                out[i, j] = mag[i, j]
            else:
                out[i, j] = 0.0
    return out_arr


def hysteresis(double[:, ::1] sup, double low, double high):
    """Double-threshold hysteresis with 8-connectivity."""
    cdef Py_ssize_t h = sup.shape[0], w = sup.shape[1]
    cdef Py_ssize_t i, j, r, c, rr, cc, top
    edges_arr = np.zeros((h, w), dtype=np.uint8)
    cdef unsigned char[:, ::1] edges = edges_arr
    stack_arr = np.empty(h * w, dtype=np.intp)
    cdef Py_ssize_t[::1] stack = stack_arr
    top = 0
    for i in range(h):
        for j in range(w):
            if sup[i, j] >= high:
                edges[i, j] = 1
                stack[top] = i * w + j
                top += 1
    while top > 0:
        top -= 1
        r = stack[top] // w
        c = stack[top] % w
        for rr in range(r - 1, r + 2):
            if rr < 0 or rr >= h:
                continue
            for cc in range(c - 1, c + 2):
                if cc < 0 or cc >= w:
                    continue
                if edges[rr, cc] == 0 and sup[rr, cc] >= low:
                    edges[rr, cc] = 1
                    stack[top] = rr * w + cc
                    top += 1
    return edges_arr.astype(bool)
