# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Must stay numerically in step with ``_pykernels``."""


def rb_sweep(double[:, :, ::1] F, double[:, :, ::1] B,
             const double[:, :, ::1] C, const double[:, ::1] alpha,
             double lam, int color, double omega):
    """Relaxed block update of every pixel with ``(y + x) % 2 == color``, in place."""
    cdef Py_ssize_t h = alpha.shape[0], w = alpha.shape[1], k = C.shape[2]
    cdef Py_ssize_t y, x, c
    cdef double a, a1, n, ln, a11, a12, a22, det, f, b, res, lf, lb, g1, g2, dd
    with nogil:
        for y in range(h):
            x = (color + y) % 2
            while x < w:
                a = alpha[y, x]
                a1 = 1.0 - a
                n = (y > 0) + (y < h - 1) + (x > 0) + (x < w - 1)
                ln = lam * n
                a11 = a * a + ln
                a12 = a * a1
                a22 = a1 * a1 + ln
                det = a11 * a22 - a12 * a12
                for c in range(k):
                    f = F[y, x, c]
                    b = B[y, x, c]
                    res = C[y, x, c] - b - a * (f - b)
                    if ln == 0.0:
                        # no smoothness coupling: project onto the blend constraint
                        dd = a * a + a1 * a1
                        F[y, x, c] = f + a * res / dd
                        B[y, x, c] = b + a1 * res / dd
                        continue
                    lf = 0.0
                    lb = 0.0
                    if y > 0:
                        lf = lf + (F[y - 1, x, c] - f)
                        lb = lb + (B[y - 1, x, c] - b)
                    if y < h - 1:
                        lf = lf + (F[y + 1, x, c] - f)
                        lb = lb + (B[y + 1, x, c] - b)
                    if x > 0:
                        lf = lf + (F[y, x - 1, c] - f)
                        lb = lb + (B[y, x - 1, c] - b)
                    if x < w - 1:
                        lf = lf + (F[y, x + 1, c] - f)
                        lb = lb + (B[y, x + 1, c] - b)
                    g1 = a * res + lam * lf
                    g2 = a1 * res + lam * lb
                    F[y, x, c] = f + omega * ((a22 * g1 - a12 * g2) / det)
                    B[y, x, c] = b + omega * ((a11 * g2 - a12 * g1) / det)
                x += 2


def box_sum(const double[:, ::1] src, int r):
    """Sum over the (2r+1)^2 window around each pixel, truncated at the borders."""
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1], y, x, lo, hi
    cdef double[:, ::1] cs, tmp, out
    cdef double[::1] row
    import numpy as np
    cs_arr = np.zeros((h + 1, w), dtype=np.float64)
    tmp_arr = np.empty((h, w), dtype=np.float64)
    out_arr = np.empty((h, w), dtype=np.float64)
    row_arr = np.zeros(w + 1, dtype=np.float64)
    cs = cs_arr
    tmp = tmp_arr
    out = out_arr
    row = row_arr
    with nogil:
        for y in range(h):
            for x in range(w):
                cs[y + 1, x] = cs[y, x] + src[y, x]
        for y in range(h):
            lo = y - r
            if lo < 0:
                lo = 0
            hi = y + r + 1
            if hi > h:
                hi = h
            for x in range(w):
                tmp[y, x] = cs[hi, x] - cs[lo, x]
        for y in range(h):
            for x in range(w):
                row[x + 1] = row[x] + tmp[y, x]
            for x in range(w):
                lo = x - r
                if lo < 0:
                    lo = 0
                hi = x + r + 1
                if hi > w:
                    hi = w
                out[y, x] = row[hi] - row[lo]
    return out_arr
