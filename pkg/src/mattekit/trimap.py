"""Trimap generation and region masks.

A trimap is a ``uint8`` array whose values are the :class:`Label` codes, so
it can be written to disk as-is (0 background, 128 unknown, 255 foreground).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np
import scipy.ndimage as ndi

from .errors import ConfigError
from .imagecore import check_matte, read_png, save_gray_u8


class Label(IntEnum):
    BACKGROUND = 0
    UNKNOWN = 128
    FOREGROUND = 255


@dataclass(frozen=True)
class TrimapConfig:
    fg_threshold: float = 0.95
    bg_threshold: float = 0.05
    band_radius: int = 10

    def __post_init__(self):
        if not (0.0 < self.bg_threshold < 1.0 and 0.0 < self.fg_threshold < 1.0):
            raise ConfigError("trimap thresholds must lie in (0, 1)")
        if not self.bg_threshold < self.fg_threshold:
            raise ConfigError(
                f"bg_threshold ({self.bg_threshold}) must be below fg_threshold ({self.fg_threshold})"
            )
        if int(self.band_radius) != self.band_radius or self.band_radius < 0:
            raise ConfigError(f"band_radius must be a non-negative integer, got {self.band_radius}")


def disk(radius):
    """Offsets with ``dy^2 + dx^2 <= (radius + 0.5)^2``; radius 1 is the 3x3 square."""
    r = int(radius)
    yy, xx = np.mgrid[-r : r + 1, -r : r + 1]
    return yy * yy + xx * xx <= r * r + r


def erode(mask, radius):
    """Disk erosion; pixels outside the image count as inside the mask."""
    mask = np.asarray(mask, dtype=bool)
    if radius == 0 or mask.all():
        return mask.copy()
    if not mask.any():
        return mask.copy()
    # squared distances are integers, so d^2 > r^2 + r  <=>  d > r + 0.5
    d2 = ndi.distance_transform_edt(mask) ** 2
    return d2 > radius * radius + radius + 0.5


def generate_trimap(alpha, config: TrimapConfig | None = None):
    config = config or TrimapConfig()
    a = check_matte(alpha)
    fg = erode(a >= config.fg_threshold, config.band_radius)
    bg = erode(a <= config.bg_threshold, config.band_radius)
    trimap = np.full(a.shape, Label.UNKNOWN, dtype=np.uint8)
    trimap[fg] = Label.FOREGROUND
    trimap[bg] = Label.BACKGROUND
    return trimap


def check_trimap(trimap):
    trimap = np.asarray(trimap)
    if trimap.ndim != 2:
        raise ValueError(f"trimap must be 2-D, got shape {trimap.shape}")
    valid = (trimap == Label.BACKGROUND) | (trimap == Label.UNKNOWN) | (trimap == Label.FOREGROUND)
    if not valid.all():
        raise ValueError("trimap values must be 0, 128 or 255")
    return trimap.astype(np.uint8, copy=False)


def region_mask(trimap, region):
    """Binary float mask, 1 where the trimap carries ``region``."""
    trimap = check_trimap(trimap)
    region = Label[region.upper()] if isinstance(region, str) else Label(region)
    return (trimap == region).astype(np.float64)


def load_trimap(path):
    arr, header = read_png(path, allowed_color_types=(0,))
    if header.bit_depth != 8:
        raise ValueError(f"{path}: trimaps must be 8-bit greyscale")
    return check_trimap(np.round(arr * 255.0).astype(np.uint8))


def save_trimap(path, trimap):
    save_gray_u8(path, check_trimap(trimap))
