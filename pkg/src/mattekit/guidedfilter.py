"""Colour-guided filtering and guided upscaling of alpha mattes."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .errors import ConfigError, DimensionError
from .imagecore import check_image, check_matte, check_same_size, resample, resize_unclamped

UPSCALE_METHODS = ("bilinear", "fast_guided")


@dataclass(frozen=True)
class GuidedFilterConfig:
    radius: int = 8
    epsilon: float = 1e-4
    subsample: int = 4

    def __post_init__(self):
        if int(self.radius) != self.radius or self.radius < 1:
            raise ConfigError(f"radius must be an integer >= 1, got {self.radius}")
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")
        if int(self.subsample) != self.subsample or self.subsample < 1:
            raise ConfigError(f"subsample must be an integer >= 1, got {self.subsample}")


def box_mean(x, r, backend=None):
    """Mean over the (2r+1)^2 window, divided by the in-image pixel count."""
    x = np.asarray(x, dtype=np.float64)
    h, w = x.shape[:2]
    count = kernels.box_sum(np.ones((h, w)), r, backend=backend)
    if x.ndim == 2:
        return kernels.box_sum(x, r, backend=backend) / count
    out = np.empty_like(x)
    for c in range(x.shape[2]):
        out[..., c] = kernels.box_sum(x[..., c], r, backend=backend) / count
    return out


def guided_coefficients(I, p, r, eps, backend=None):
    """Per-window linear coefficients ``a`` (H, W, 3) and ``b`` (H, W)."""
    mean_I = box_mean(I, r, backend)
    mean_p = box_mean(p, r, backend)
    mean_Ip = box_mean(I * p[..., None], r, backend)
    cov_Ip = mean_Ip - mean_I * mean_p[..., None]

    sigma = np.empty(I.shape[:2] + (3, 3))
    for i in range(3):
        for j in range(i, 3):
            v = box_mean(I[..., i] * I[..., j], r, backend) - mean_I[..., i] * mean_I[..., j]
            sigma[..., i, j] = v
            sigma[..., j, i] = v
    sigma += eps * np.eye(3)
    a = np.linalg.solve(sigma, cov_Ip[..., None])[..., 0]
    b = mean_p - np.einsum("...c,...c->...", a, mean_I)
    return a, b


def _centred(guide, inp):
    # the filter is affine-equivariant in both inputs; shifting by one pixel's
    # value keeps constants exact and the variances well conditioned
    g0 = guide[0, 0].copy()
    p0 = float(inp[0, 0])
    return guide - g0, inp - p0, p0


def guided_filter(guide, input, config: GuidedFilterConfig | None = None, backend=None):
    config = config or GuidedFilterConfig()
    guide = check_image(guide, "guide")
    inp = check_matte(input, "input")
    check_same_size(guide, inp, names=["guide", "input"])
    I, p, p0 = _centred(guide, inp)
    r = int(config.radius)
    a, b = guided_coefficients(I, p, r, config.epsilon, backend)
    q = np.einsum("...c,...c->...", box_mean(a, r, backend), I) + box_mean(b, r, backend)
    return np.clip(q + p0, 0.0, 1.0)


def fast_guided_filter(guide_full, input_low, config: GuidedFilterConfig | None = None, backend=None):
    """Guided filter with coefficients solved on a box-downsampled guide.

    The guide is reduced by ``config.subsample`` to the input's size, the
    coefficients are box-averaged there with radius ``radius / subsample``,
    then bilinearly upsampled and applied to the full-resolution guide.
    """
    config = config or GuidedFilterConfig()
    guide = check_image(guide_full, "guide_full")
    low = check_matte(input_low, "input_low")
    H, W = guide.shape[:2]
    h, w = low.shape
    s = int(config.subsample)
    if (round(H / s), round(W / s)) != (h, w):
        raise DimensionError(
            f"guide {W}x{H} subsampled by {s} is {round(W / s)}x{round(H / s)}, input is {w}x{h}"
        )
    I, p, p0 = _centred(guide, low)
    I_low = resize_unclamped(I, w, h, "box")
    r = max(1, round(config.radius / s))
    a, b = guided_coefficients(I_low, p, r, config.epsilon, backend)
    mean_a = resize_unclamped(box_mean(a, r, backend), W, H, "bilinear")
    mean_b = resize_unclamped(box_mean(b, r, backend), W, H, "bilinear")
    q = np.einsum("...c,...c->...", mean_a, I) + mean_b
    return np.clip(q + p0, 0.0, 1.0)


def upscale_alpha(alpha_low, guide_full, method="fast_guided", config: GuidedFilterConfig | None = None):
    """Bring a low-resolution matte up to the guide's resolution."""
    if method not in UPSCALE_METHODS:
        raise ValueError(f"unknown upscale method {method!r}; expected one of {UPSCALE_METHODS}")
    config = config or GuidedFilterConfig()
    low = check_matte(alpha_low, "alpha_low")
    guide = check_image(guide_full, "guide_full")
    H, W = guide.shape[:2]
    h, w = low.shape
    if h > H or w > W:
        raise DimensionError(f"alpha ({w}x{h}) is larger than the guide ({W}x{H})")
    if method == "bilinear":
        return resample(low, W, H, "bilinear")
    s = max(1, round(H / h))
    return fast_guided_filter(guide, low, replace(config, subsample=s))
