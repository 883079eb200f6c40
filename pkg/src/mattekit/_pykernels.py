"""Pure numpy versions of the compiled kernels in ``_native.pyx``.

The arithmetic is ordered the same way as the compiled loops so both
backends agree to the last few ulps.
"""
import numpy as np


def neighbour_count(h, w):
    ys = np.arange(h)
    xs = np.arange(w)
    ny = (ys > 0).astype(np.float64) + (ys < h - 1)
    nx = (xs > 0).astype(np.float64) + (xs < w - 1)
    return ny[:, None] + nx[None, :]


def _update(F, B, Fp, Bp, C, alpha, count, lam, omega, p, q):
    """Relaxed update of the sub-grid ``[p::2, q::2]``; ``Fp``/``Bp`` are edge-padded copies."""
    h, w = alpha.shape
    ys, xs = slice(p, h, 2), slice(q, w, 2)
    a = alpha[ys, xs, None]
    a1 = 1.0 - a
    ln = lam * count[ys, xs, None]
    f = F[ys, xs]
    b = B[ys, xs]
    res = C[ys, xs] - b - a * (f - b)

    # edge padding makes the missing neighbours contribute exact zeros, in
    # the same up, down, left, right order as the compiled loop
    def lap(P, X):
        s = P[p : h : 2, 1 + q : 1 + w : 2] - X
        s += P[2 + p : 2 + h : 2, 1 + q : 1 + w : 2] - X
        s += P[1 + p : 1 + h : 2, q : w : 2] - X
        s += P[1 + p : 1 + h : 2, 2 + q : 2 + w : 2] - X
        return s

    g1 = a * res + lam * lap(Fp, f)
    g2 = a1 * res + lam * lap(Bp, b)
    a11 = a * a + ln
    a12 = a * a1
    a22 = a1 * a1 + ln
    det = a11 * a22 - a12 * a12
    with np.errstate(divide="ignore", invalid="ignore"):
        f_new = f + omega * ((a22 * g1 - a12 * g2) / det)
        b_new = b + omega * ((a11 * g2 - a12 * g1) / det)
    free = np.broadcast_to(ln == 0.0, f.shape)
    if free.any():
        dd = a * a + a1 * a1
        f_new = np.where(free, f + a * res / dd, f_new)
        b_new = np.where(free, b + a1 * res / dd, b_new)
    F[ys, xs] = f_new
    B[ys, xs] = b_new


def rb_sweep(F, B, C, alpha, lam, color, omega):
    h, w = alpha.shape
    count = neighbour_count(h, w)
    pad = ((1, 1), (1, 1), (0, 0))
    Fp = np.pad(F, pad, mode="edge")
    Bp = np.pad(B, pad, mode="edge")
    # pixels with (y + x) % 2 == color: even rows at x = color, odd rows at 1 - color
    for p in (0, 1):
        if p < h:
            _update(F, B, Fp, Bp, C, alpha, count, lam, omega, p, (color + p) % 2)


def box_sum(src, r):
    h, w = src.shape
    cs = np.zeros((h + 1, w))
    np.cumsum(src, axis=0, out=cs[1:])
    lo = np.clip(np.arange(h) - r, 0, h)
    hi = np.clip(np.arange(h) + r + 1, 0, h)
    tmp = cs[hi] - cs[lo]

    row = np.zeros((h, w + 1))
    np.cumsum(tmp, axis=1, out=row[:, 1:])
    lo = np.clip(np.arange(w) - r, 0, w)
    hi = np.clip(np.arange(w) + r + 1, 0, w)
    return row[:, hi] - row[:, lo]
