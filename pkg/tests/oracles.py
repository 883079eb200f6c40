"""Brute-force reference implementations used only by the tests.

Nothing here imports mattekit: every routine is written from the metric or
filter definition with explicit loops and index arithmetic.
"""
import math
from collections import deque

import numpy as np


def reflect101(i, n):
    if n == 1:
        return 0
    period = 2 * n - 2
    i = abs(i) % period
    return i if i < n else period - i


def pad_reflect101(img, r):
    h, w = img.shape
    rows = [reflect101(i, h) for i in range(-r, h + r)]
    cols = [reflect101(j, w) for j in range(-r, w + r)]
    return img[np.ix_(rows, cols)]


# --------------------------------------------------------------------------
# metrics


def sad_mse_mad(pred, gt, region=None):
    h, w = pred.shape
    total_abs = total_sq = 0.0
    n = 0
    for y in range(h):
        for x in range(w):
            if region is not None and region[y, x] != 1:
                continue
            d = float(pred[y, x]) - float(gt[y, x])
            total_abs += abs(d)
            total_sq += d * d
            n += 1
    if n == 0:
        return 0.0, 0.0, 0.0
    return total_abs / 1000.0, total_sq / n, total_abs / n


def derivative_kernel_2d(sigma=1.4):
    """Sampled 2-D x-derivative-of-Gaussian kernel, unit Frobenius norm."""
    R = math.ceil(3 * sigma)
    size = 2 * R + 1
    hx = np.zeros((size, size))
    for i in range(size):
        for j in range(size):
            u, v = i - R, j - R
            g = math.exp(-(u * u) / (2 * sigma**2)) / (sigma * math.sqrt(2 * math.pi))
            gv = math.exp(-(v * v) / (2 * sigma**2)) / (sigma * math.sqrt(2 * math.pi))
            hx[i, j] = g * (-v * gv / sigma**2)
    return hx / math.sqrt((hx * hx).sum())


def convolve2d_direct(img, kernel):
    R = kernel.shape[0] // 2
    padded = pad_reflect101(img, R)
    flipped = kernel[::-1, ::-1]
    h, w = img.shape
    out = np.empty((h, w))
    for y in range(h):
        for x in range(w):
            out[y, x] = float((padded[y : y + 2 * R + 1, x : x + 2 * R + 1] * flipped).sum())
    return out


def gradient_error(pred, gt, sigma=1.4):
    hx = derivative_kernel_2d(sigma)
    hy = hx.T

    def mag(img):
        gx = convolve2d_direct(img, hx)
        gy = convolve2d_direct(img, hy)
        return np.sqrt(gx * gx + gy * gy)

    d = mag(pred) - mag(gt)
    return float((d * d).sum()) / 1000.0


def components(mask):
    """4-connected components by BFS in raster order: list of pixel lists."""
    h, w = mask.shape
    seen = np.zeros((h, w), dtype=bool)
    comps = []
    for y in range(h):
        for x in range(w):
            if not mask[y, x] or seen[y, x]:
                continue
            comp = []
            q = deque([(y, x)])
            seen[y, x] = True
            while q:
                cy, cx = q.popleft()
                comp.append((cy, cx))
                for ny, nx in ((cy - 1, cx), (cy + 1, cx), (cy, cx - 1), (cy, cx + 1)):
                    if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not seen[ny, nx]:
                        seen[ny, nx] = True
                        q.append((ny, nx))
            comps.append(comp)
    return comps


def connectivity_error(pred, gt, delta=0.15):
    h, w = pred.shape
    level = np.zeros((h, w))
    for k in range(1, 10):
        theta = k / 10
        mask = (pred >= theta) & (gt >= theta)
        comps = components(mask)
        if not comps:
            continue
        # strict '>' keeps the first-found component on ties
        best = comps[0]
        for c in comps[1:]:
            if len(c) > len(best):
                best = c
        for y, x in best:
            level[y, x] = theta  # thetas ascend, so this ends at the largest
    total = 0.0
    for y in range(h):
        for x in range(w):
            dp = pred[y, x] - level[y, x]
            dg = gt[y, x] - level[y, x]
            php = 1.0 - (dp if dp >= delta else 0.0)
            phg = 1.0 - (dg if dg >= delta else 0.0)
            total += abs(php - phg)
    return total / 1000.0


# --------------------------------------------------------------------------
# pyramids


BINOMIAL = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0
BINOMIAL_2D = np.outer(BINOMIAL, BINOMIAL)


def blur2d(img, gain=1.0):
    padded = pad_reflect101(img, 2)
    h, w = img.shape
    out = np.empty((h, w))
    k = BINOMIAL_2D * gain
    for y in range(h):
        for x in range(w):
            out[y, x] = float((padded[y : y + 5, x : x + 5] * k).sum())
    return out


def laplacian_pyramid(img, levels):
    gauss = [np.asarray(img, dtype=float)]
    for _ in range(levels - 1):
        gauss.append(blur2d(gauss[-1])[::2, ::2])
    bands = []
    for g, g_next in zip(gauss[:-1], gauss[1:]):
        z = np.zeros(g.shape)
        z[::2, ::2] = g_next
        bands.append(g - blur2d(z, gain=4.0))
    return bands + [gauss[-1]]


def laplacian_loss(pred, gt, levels):
    lp, lg = laplacian_pyramid(pred, levels), laplacian_pyramid(gt, levels)
    return sum((2.0**s) * float(np.abs(p - g).mean()) for s, (p, g) in enumerate(zip(lp, lg)))


# --------------------------------------------------------------------------
# guided filter


def window_coefficients(I, p, r, eps):
    """Per-window ridge regression of p on the colour guide, by lstsq."""
    h, w = p.shape
    a = np.zeros((h, w, 3))
    b = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            ys = range(max(0, y - r), min(h, y + r + 1))
            xs = range(max(0, x - r), min(w, x + r + 1))
            rows, rhs = [], []
            for yy in ys:
                for xx in xs:
                    rows.append([I[yy, xx, 0], I[yy, xx, 1], I[yy, xx, 2], 1.0])
                    rhs.append(p[yy, xx])
            n = len(rows)
            ridge = math.sqrt(eps * n)
            for c in range(3):
                row = [0.0, 0.0, 0.0, 0.0]
                row[c] = ridge
                rows.append(row)
                rhs.append(0.0)
            sol = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)[0]
            a[y, x] = sol[:3]
            b[y, x] = sol[3]
    return a, b


def window_average(x, r):
    h, w = x.shape[:2]
    out = np.zeros_like(x, dtype=float)
    for y in range(h):
        for xx in range(w):
            win = x[max(0, y - r) : y + r + 1, max(0, xx - r) : xx + r + 1]
            out[y, xx] = win.reshape((-1,) + x.shape[2:]).mean(axis=0)
    return out


def guided_filter(I, p, r, eps):
    a, b = window_coefficients(I, p, r, eps)
    ma, mb = window_average(a, r), window_average(b, r)
    return np.clip((ma * I).sum(axis=2) + mb, 0.0, 1.0)


def bilinear_upsample(x, H, W):
    """Half-pixel-centre bilinear interpolation with edge clamping."""
    h, w = x.shape[:2]
    out = np.zeros((H, W) + x.shape[2:])
    for Y in range(H):
        sy = min(max((Y + 0.5) * h / H - 0.5, 0.0), h - 1)
        y0 = int(math.floor(sy))
        y1 = min(y0 + 1, h - 1)
        ty = sy - y0
        for X in range(W):
            sx = min(max((X + 0.5) * w / W - 0.5, 0.0), w - 1)
            x0 = int(math.floor(sx))
            x1 = min(x0 + 1, w - 1)
            tx = sx - x0
            top = x[y0, x0] * (1 - tx) + x[y0, x1] * tx
            bot = x[y1, x0] * (1 - tx) + x[y1, x1] * tx
            out[Y, X] = top * (1 - ty) + bot * ty
    return out


def fast_guided_filter(I_full, p_low, s, r, eps):
    H, W = I_full.shape[:2]
    h, w = p_low.shape
    I_low = np.zeros((h, w, 3))
    for y in range(h):
        for x in range(w):
            I_low[y, x] = I_full[y * s : (y + 1) * s, x * s : (x + 1) * s].reshape(-1, 3).mean(axis=0)
    r_low = max(1, round(r / s))
    a, b = window_coefficients(I_low, p_low, r_low, eps)
    ma = bilinear_upsample(window_average(a, r_low), H, W)
    mb = bilinear_upsample(window_average(b, r_low), H, W)
    return np.clip((ma * I_full).sum(axis=2) + mb, 0.0, 1.0)


# --------------------------------------------------------------------------
# foreground / background energy


def fb_least_squares(C, alpha, lam):
    """Exact minimiser of the F/B energy, one dense least-squares solve per channel."""
    h, w = alpha.shape
    n = h * w
    idx = lambda y, x: y * w + x  # noqa: E731
    F = np.zeros((h, w, C.shape[2]))
    B = np.zeros_like(F)
    pairs = []
    for y in range(h):
        for x in range(w):
            if y + 1 < h:
                pairs.append((idx(y, x), idx(y + 1, x)))
            if x + 1 < w:
                pairs.append((idx(y, x), idx(y, x + 1)))
    s = math.sqrt(lam)
    for c in range(C.shape[2]):
        rows, rhs = [], []
        for y in range(h):
            for x in range(w):
                row = np.zeros(2 * n)
                row[idx(y, x)] = alpha[y, x]
                row[n + idx(y, x)] = 1 - alpha[y, x]
                rows.append(row)
                rhs.append(C[y, x, c])
        for i, j in pairs:
            for off in (0, n):
                row = np.zeros(2 * n)
                row[off + i] = s
                row[off + j] = -s
                rows.append(row)
                rhs.append(0.0)
        sol = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)[0]
        F[..., c] = sol[:n].reshape(h, w)
        B[..., c] = sol[n:].reshape(h, w)
    return F, B


def fb_energy(F, B, C, alpha, lam):
    h, w = alpha.shape
    e = 0.0
    for y in range(h):
        for x in range(w):
            for c in range(C.shape[2]):
                r = alpha[y, x] * F[y, x, c] + (1 - alpha[y, x]) * B[y, x, c] - C[y, x, c]
                e += r * r
                for ny, nx in ((y + 1, x), (y, x + 1)):
                    if ny < h and nx < w:
                        e += lam * ((F[y, x, c] - F[ny, nx, c]) ** 2 + (B[y, x, c] - B[ny, nx, c]) ** 2)
    return e


# --------------------------------------------------------------------------
# morphology


def erode_disk(mask, radius):
    """Disk (d^2 <= (r + 0.5)^2) erosion; outside-image pixels count as set."""
    h, w = mask.shape
    out = np.zeros_like(mask, dtype=bool)
    for y in range(h):
        for x in range(w):
            keep = True
            for dy in range(-radius, radius + 1):
                for dx in range(-radius, radius + 1):
                    if dy * dy + dx * dx > (radius + 0.5) ** 2:
                        continue
                    yy, xx = y + dy, x + dx
                    if 0 <= yy < h and 0 <= xx < w and not mask[yy, xx]:
                        keep = False
            out[y, x] = keep
    return out
