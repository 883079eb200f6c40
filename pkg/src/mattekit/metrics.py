"""Matting evaluation metrics.

SAD, Grad and Conn are reported in thousands (the raw sums divided by
1000); MSE and MAD are plain per-pixel means.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np
import scipy.ndimage as ndi

from .imagecore import check_matte, check_same_size
from .trimap import Label, check_trimap

GRAD_SIGMA = 1.4
CONN_THRESHOLDS = tuple(i / 10 for i in range(1, 10))
CONN_DELTA = 0.15

_FOUR_CONNECTED = ndi.generate_binary_structure(2, 1)


@dataclass(frozen=True)
class MetricReport:
    sad: float
    mse: float
    mad: float
    sad_t: float
    mse_t: float
    mad_t: float
    sad_fg: float
    sad_bg: float
    grad: float
    conn: float

    @classmethod
    def names(cls):
        return [f.name for f in fields(cls)]

    def as_dict(self):
        return asdict(self)


def _pair(pred, gt):
    pred = check_matte(pred, "pred")
    gt = check_matte(gt, "gt")
    check_same_size(pred, gt, names=["pred", "gt"])
    return pred, gt


def absolute_diff_metrics(pred, gt, region=None):
    """``(sad, mse, mad)`` over the pixels where ``region`` is 1 (default: all)."""
    pred, gt = _pair(pred, gt)
    diff = pred - gt
    if region is not None:
        region = np.asarray(region)
        check_same_size(pred, region, names=["pred", "region"])
        if not np.isin(region, (0, 1)).all():
            raise ValueError("region mask must be binary (0/1)")
        diff = diff[region.astype(bool)]
    if diff.size == 0:
        return 0.0, 0.0, 0.0
    ad = np.abs(diff)
    return float(ad.sum() / 1000.0), float(np.mean(diff * diff)), float(ad.mean())


def gaussian_derivative_kernels(sigma=GRAD_SIGMA):
    """1-D Gaussian and its derivative, radius ``ceil(3 sigma)``.

    Each is scaled to unit L2 norm, which makes their outer product the
    unit-norm 2-D derivative filter used by the standard gradient error.
    """
    radius = math.ceil(3 * sigma)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    g = np.exp(-(x**2) / (2 * sigma**2)) / (sigma * math.sqrt(2 * math.pi))
    dg = -x * g / sigma**2
    return g / np.linalg.norm(g), dg / np.linalg.norm(dg)


def gradient_magnitude(x, sigma=GRAD_SIGMA):
    g, dg = gaussian_derivative_kernels(sigma)
    gx = ndi.convolve1d(ndi.convolve1d(x, g, axis=0, mode="mirror"), dg, axis=1, mode="mirror")
    gy = ndi.convolve1d(ndi.convolve1d(x, dg, axis=0, mode="mirror"), g, axis=1, mode="mirror")
    return np.hypot(gx, gy)


def gradient_error(pred, gt, sigma=GRAD_SIGMA):
    pred, gt = _pair(pred, gt)
    d = gradient_magnitude(pred, sigma) - gradient_magnitude(gt, sigma)
    return float(np.sum(d * d) / 1000.0)


def largest_component(mask):
    """Largest 4-connected component; ties go to the one met first in raster order."""
    labels, n = ndi.label(mask, structure=_FOUR_CONNECTED)
    if n == 0:
        return np.zeros(mask.shape, dtype=bool)
    sizes = np.bincount(labels.ravel())
    sizes[0] = 0
    best = np.flatnonzero(sizes == sizes.max())
    if len(best) > 1:
        flat = labels.ravel()
        first = {lab: np.argmax(flat == lab) for lab in best}
        best = [min(best, key=first.__getitem__)]
    return labels == best[0]


def connectivity_levels(pred, gt, thresholds=CONN_THRESHOLDS):
    """Per pixel, the largest threshold at which it lies in the dominant shared component."""
    level = np.zeros(pred.shape)
    for theta in sorted(thresholds):
        omega = largest_component((pred >= theta) & (gt >= theta))
        level[omega] = theta
    return level


def connectivity_error(pred, gt, thresholds=CONN_THRESHOLDS, delta=CONN_DELTA):
    pred, gt = _pair(pred, gt)
    level = connectivity_levels(pred, gt, thresholds)

    def phi(x):
        d = x - level
        return 1.0 - d * (d >= delta)

    return float(np.sum(np.abs(phi(pred) - phi(gt))) / 1000.0)


def evaluate(pred, gt, trimap) -> MetricReport:
    """Whole-image, unknown-band and FG/BG metrics for one pair."""
    pred, gt = _pair(pred, gt)
    trimap = check_trimap(trimap)
    check_same_size(pred, trimap, names=["pred", "trimap"])
    sad, mse, mad = absolute_diff_metrics(pred, gt)
    sad_t, mse_t, mad_t = absolute_diff_metrics(pred, gt, trimap == Label.UNKNOWN)
    sad_fg = absolute_diff_metrics(pred, gt, trimap == Label.FOREGROUND)[0]
    sad_bg = absolute_diff_metrics(pred, gt, trimap == Label.BACKGROUND)[0]
    return MetricReport(
        sad=sad,
        mse=mse,
        mad=mad,
        sad_t=sad_t,
        mse_t=mse_t,
        mad_t=mad_t,
        sad_fg=sad_fg,
        sad_bg=sad_bg,
        grad=gradient_error(pred, gt),
        conn=connectivity_error(pred, gt),
    )
