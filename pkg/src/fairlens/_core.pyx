# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: integral image, multi-scale center-surround contrast,
8-connected component labeling and pairwise Euclidean distance sums."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()


def integral_image(const double[:, ::1] gray):
    cdef Py_ssize_t h = gray.shape[0], w = gray.shape[1], y, x
    cdef double row
    out = np.zeros((h + 1, w + 1), dtype=np.float64)
    cdef double[:, ::1] ii = out
    for y in range(h):
        row = 0.0
        for x in range(w):
            row += gray[y, x]
            ii[y + 1, x + 1] = ii[y, x + 1] + row
    return out


def center_surround(const double[:, ::1] gray, const double[:, ::1] ii, radii):
    cdef Py_ssize_t h = gray.shape[0], w = gray.shape[1]
    cdef Py_ssize_t y, x, y0, y1, x0, x1, r
    cdef double s, mean
    out = np.zeros((h, w), dtype=np.float64)
    cdef double[:, ::1] raw = out
    for r in radii:
        for y in range(h):
            y0 = y - r if y >= r else 0
            y1 = y + r + 1 if y + r + 1 <= h else h
            for x in range(w):
                x0 = x - r if x >= r else 0
                x1 = x + r + 1 if x + r + 1 <= w else w
                s = ii[y1, x1] - ii[y0, x1] - ii[y1, x0] + ii[y0, x0]
                mean = s / <double>((y1 - y0) * (x1 - x0))
                raw[y, x] += fabs(gray[y, x] - mean)
    return out


cdef inline double _dist(const double* p, const double* q, Py_ssize_t d) nogil:
    # four independent accumulators let the compiler pipeline the loop
    cdef double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0, t
    cdef Py_ssize_t i = 0
    while i + 4 <= d:
        t = p[i] - q[i]
        a0 += t * t
        t = p[i + 1] - q[i + 1]
        a1 += t * t
        t = p[i + 2] - q[i + 2]
        a2 += t * t
        t = p[i + 3] - q[i + 3]
        a3 += t * t
        i += 4
    while i < d:
        t = p[i] - q[i]
        a0 += t * t
        i += 1
    return sqrt((a0 + a1) + (a2 + a3))


def label_components(const unsigned char[:, ::1] mask):
    cdef Py_ssize_t h = mask.shape[0], w = mask.shape[1]
    cdef Py_ssize_t y, x, cy, cx, ny, nx, top, y_lo, y_hi, x_lo, x_hi
    cdef int n = 0
    labels_arr = np.zeros((h, w), dtype=np.int32)
    cdef int[:, ::1] labels = labels_arr
    sy_arr = np.empty(max(h * w, 1), dtype=np.intp)
    sx_arr = np.empty(max(h * w, 1), dtype=np.intp)
    cdef Py_ssize_t[::1] sy = sy_arr
    cdef Py_ssize_t[::1] sx = sx_arr
    for y in range(h):
        for x in range(w):
            if mask[y, x] == 0 or labels[y, x] != 0:
                continue
            n += 1
            labels[y, x] = n
            sy[0] = y
            sx[0] = x
            top = 1
            while top > 0:
                top -= 1
                cy = sy[top]
                cx = sx[top]
                y_lo = cy - 1 if cy > 0 else 0
                y_hi = cy + 2 if cy + 2 <= h else h
                x_lo = cx - 1 if cx > 0 else 0
                x_hi = cx + 2 if cx + 2 <= w else w
                for ny in range(y_lo, y_hi):
                    for nx in range(x_lo, x_hi):
                        if mask[ny, nx] != 0 and labels[ny, nx] == 0:
                            labels[ny, nx] = n
                            sy[top] = ny
                            sx[top] = nx
                            top += 1
    return labels_arr, n


def pairwise_within_sum(const double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1], j, k
    cdef double total = 0.0
    if n < 2:
        return 0.0
    with nogil:
        for j in range(n):
            for k in range(j + 1, n):
                total += _dist(&x[j, 0], &x[k, 0], d)
    return total


def pairwise_cross_sum(const double[:, ::1] a, const double[:, ::1] b):
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], d = a.shape[1], k, l
    cdef double total = 0.0
    if na == 0 or nb == 0:
        return 0.0
    with nogil:
        for k in range(na):
            for l in range(nb):
                total += _dist(&a[k, 0], &b[l, 0], d)
    return total
