"""Raster helpers: PNG I/O, resampling and Gaussian/Laplacian pyramids.

Images are ``float64`` arrays of shape ``(H, W, 3)`` and mattes are
``float64`` arrays of shape ``(H, W)``, both with values in ``[0, 1]``.
"""
from __future__ import annotations

import os
import struct
from functools import lru_cache
from dataclasses import dataclass, field

import cv2
import numpy as np
import scipy.ndimage as ndi
import scipy.sparse as sp

from .errors import DimensionError, NotPNGError, PNGError, UnsupportedPNGError

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"

# colour type -> channel count, from the PNG IHDR definition
_COLOR_TYPES = {0: 1, 2: 3, 3: 1, 4: 2, 6: 4}

_PYR_KERNEL = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0

RESAMPLE_METHODS = ("nearest", "bilinear", "box")


def check_image(image, name="image"):
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 3 or image.shape[2] != 3:
        raise DimensionError(f"{name} must have shape (H, W, 3), got {image.shape}")
    if image.shape[0] < 1 or image.shape[1] < 1:
        raise DimensionError(f"{name} must be non-empty, got {image.shape}")
    if not np.isfinite(image).all():
        raise ValueError(f"{name} contains non-finite values")
    return image


def check_matte(alpha, name="alpha"):
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.ndim != 2 or alpha.shape[0] < 1 or alpha.shape[1] < 1:
        raise DimensionError(f"{name} must have shape (H, W), got {alpha.shape}")
    if not np.isfinite(alpha).all():
        raise ValueError(f"{name} contains non-finite values")
    return alpha


def check_same_size(*rasters, names=None):
    shapes = [np.shape(r)[:2] for r in rasters]
    if len(set(shapes)) > 1:
        names = names or [f"raster {i}" for i in range(len(rasters))]
        desc = ", ".join(f"{n}={s}" for n, s in zip(names, shapes))
        raise DimensionError(f"size mismatch: {desc}")


# --------------------------------------------------------------------------
# PNG I/O


@dataclass(frozen=True)
class PNGHeader:
    width: int
    height: int
    bit_depth: int
    color_type: int

    @property
    def channels(self):
        return _COLOR_TYPES[self.color_type]


def read_png_header(data: bytes) -> PNGHeader:
    if len(data) < 8 or data[:8] != PNG_SIGNATURE:
        raise NotPNGError("not a PNG (bad signature)")
    if len(data) < 33 or data[12:16] != b"IHDR":
        raise PNGError("corrupt PNG: missing IHDR chunk")
    width, height, depth, ctype = struct.unpack(">IIBB", data[16:26])
    if ctype not in _COLOR_TYPES:
        raise PNGError(f"corrupt PNG: invalid colour type {ctype}")
    return PNGHeader(width, height, depth, ctype)


def read_png(path, allowed_color_types=(0, 2, 6)):
    """Decode a PNG to floats in ``[0, 1]``; returns ``(array, header)``.

    The array is ``(H, W)`` for greyscale and ``(H, W, C)`` otherwise, with
    channels in RGB(A) order.
    """
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such file: {path}")
    with open(path, "rb") as fh:
        data = fh.read()
    header = read_png_header(data)
    if header.bit_depth not in (8, 16):
        raise UnsupportedPNGError(f"{path}: unsupported bit depth {header.bit_depth}")
    if header.color_type not in allowed_color_types:
        raise UnsupportedPNGError(f"{path}: unsupported colour type {header.color_type}")

    raw = cv2.imdecode(np.frombuffer(data, dtype=np.uint8), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise PNGError(f"{path}: corrupt PNG data")
    if raw.ndim == 3:
        code = cv2.COLOR_BGRA2RGBA if raw.shape[2] == 4 else cv2.COLOR_BGR2RGB
        raw = cv2.cvtColor(raw, code)
    scale = 65535.0 if raw.dtype == np.uint16 else 255.0
    return raw.astype(np.float64) / scale, header


def load_rgba(path):
    """Load an RGB or RGBA PNG; returns ``(image, alpha or None)``."""
    arr, header = read_png(path, allowed_color_types=(2, 6))
    if header.color_type == 6:
        return np.ascontiguousarray(arr[..., :3]), np.ascontiguousarray(arr[..., 3])
    return arr, None


def load_matte(path):
    """Load a matte from a greyscale PNG or from the alpha channel of an RGBA PNG."""
    arr, header = read_png(path, allowed_color_types=(0, 6))
    if header.color_type == 6:
        return np.ascontiguousarray(arr[..., 3])
    return arr


def to_uint8(x):
    return np.round(np.clip(x, 0.0, 1.0) * 255.0).astype(np.uint8)


def _write_png(path, arr8):
    if arr8.ndim == 3:
        code = cv2.COLOR_RGBA2BGRA if arr8.shape[2] == 4 else cv2.COLOR_RGB2BGR
        arr8 = cv2.cvtColor(arr8, code)
    ok, buf = cv2.imencode(".png", arr8)
    if not ok:
        raise PNGError(f"failed to encode PNG for {path}")
    with open(os.fspath(path), "wb") as fh:
        fh.write(buf.tobytes())


def save_rgba(path, image, alpha=None):
    """Write an 8-bit RGB PNG, or RGBA when ``alpha`` is given."""
    image = check_image(image)
    if alpha is not None:
        alpha = check_matte(alpha)
        check_same_size(image, alpha, names=["image", "alpha"])
        out = np.dstack([to_uint8(image), to_uint8(alpha)])
    else:
        out = to_uint8(image)
    _write_png(path, out)


def save_matte(path, alpha):
    """Write a matte as an 8-bit greyscale PNG."""
    _write_png(path, to_uint8(check_matte(alpha)))


def save_gray_u8(path, labels):
    labels = np.asarray(labels)
    if labels.ndim != 2 or labels.dtype != np.uint8:
        raise ValueError("expected a 2-D uint8 array")
    _write_png(path, labels)


# --------------------------------------------------------------------------
# resampling (half-pixel-centre convention)


def _linear_taps(n_in, n_out):
    src = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    src = np.clip(src, 0.0, n_in - 1)
    i0 = np.floor(src).astype(np.intp)
    i1 = np.minimum(i0 + 1, n_in - 1)
    return i0, i1, src - i0


def _nearest_index(n_in, n_out):
    idx = np.floor((np.arange(n_out) + 0.5) * (n_in / n_out)).astype(np.intp)
    return np.minimum(idx, n_in - 1)


@lru_cache(maxsize=64)
def _box_weights(n_in, n_out):
    """Sparse (n_out, n_in) matrix of normalised overlap areas."""
    scale = n_in / n_out
    rows, cols, vals = [], [], []
    for i in range(n_out):
        lo, hi = i * scale, (i + 1) * scale
        for j in range(int(np.floor(lo)), min(int(np.ceil(hi)), n_in)):
            overlap = min(hi, j + 1) - max(lo, j)
            if overlap > 0:
                rows.append(i)
                cols.append(j)
                vals.append(overlap / scale)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n_out, n_in))


def _resample_axis(x, n_out, axis, method):
    n_in = x.shape[axis]
    if n_in == n_out:
        return x
    x = np.moveaxis(x, axis, 0)
    if method == "nearest":
        y = x[_nearest_index(n_in, n_out)]
    elif method == "bilinear":
        i0, i1, t = _linear_taps(n_in, n_out)
        t = t.reshape((-1,) + (1,) * (x.ndim - 1))
        y = x[i0] + t * (x[i1] - x[i0])
    else:
        # offset by one sample so constant rows come out exact
        ref = x[:1]
        flat = (x - ref).reshape(n_in, -1)
        y = ref + (_box_weights(n_in, n_out) @ flat).reshape((n_out,) + x.shape[1:])
    return np.moveaxis(y, 0, axis)


def resample(raster, new_width, new_height, method="bilinear"):
    """Resize an image or matte to ``(new_height, new_width)``."""
    if method not in RESAMPLE_METHODS:
        raise ValueError(f"unknown resampling method {method!r}; expected one of {RESAMPLE_METHODS}")
    if int(new_width) < 1 or int(new_height) < 1:
        raise DimensionError(f"target size must be positive, got {new_width}x{new_height}")
    x = np.asarray(raster, dtype=np.float64)
    if x.ndim not in (2, 3):
        raise DimensionError(f"expected a 2-D or 3-D raster, got shape {x.shape}")
    y = resize_unclamped(x, new_width, new_height, method)
    if y is x:
        return x.copy()
    return np.clip(y, 0.0, 1.0)


def resize_unclamped(x, new_width, new_height, method="bilinear"):
    """Like :func:`resample` but without clamping; returns ``x`` itself on a no-op."""
    y = _resample_axis(x, int(new_height), 0, method)
    return _resample_axis(y, int(new_width), 1, method)


# --------------------------------------------------------------------------
# pyramids


@dataclass
class Pyramid:
    """Pyramid levels, finest first. Each level is ``ceil(half)`` the previous."""

    levels: list = field(default_factory=list)

    def __len__(self):
        return len(self.levels)

    def __getitem__(self, i):
        return self.levels[i]

    def __iter__(self):
        return iter(self.levels)

    def validate(self):
        if not self.levels:
            raise ValueError("pyramid has no levels")
        for k in range(1, len(self.levels)):
            prev, cur = np.shape(self.levels[k - 1]), np.shape(self.levels[k])
            want = (-(-prev[0] // 2), -(-prev[1] // 2)) + tuple(prev[2:])
            if cur != want:
                raise DimensionError(f"malformed pyramid: level {k} has shape {cur}, expected {want}")


def _blur(x, gain=1.0):
    k = _PYR_KERNEL * gain
    y = ndi.correlate1d(x, k, axis=0, mode="mirror")
    return ndi.correlate1d(y, k, axis=1, mode="mirror")


def pyr_down(x):
    return _blur(x)[::2, ::2]


def pyr_up(x, shape):
    """Zero-insert ``x`` into ``shape`` and interpolate with the pyramid kernel."""
    z = np.zeros(tuple(shape[:2]) + x.shape[2:])
    z[::2, ::2] = x
    return _blur(z, gain=2.0)


def _check_levels(shape, levels):
    if int(levels) != levels or levels < 1:
        raise ValueError(f"levels must be a positive integer, got {levels}")
    h, w = shape[:2]
    for _ in range(int(levels) - 1):
        if min(h, w) < 2:
            raise ValueError(f"{levels} pyramid levels is too many for a {shape[0]}x{shape[1]} raster")
        h, w = -(-h // 2), -(-w // 2)


def gaussian_pyramid(raster, levels):
    x = np.asarray(raster, dtype=np.float64)
    _check_levels(x.shape, levels)
    out = [x]
    for _ in range(int(levels) - 1):
        out.append(pyr_down(out[-1]))
    return Pyramid(out)


def laplacian_pyramid(raster, levels):
    """Band-pass levels ``0..n-2`` followed by the low-pass residue."""
    gauss = gaussian_pyramid(raster, levels).levels
    bands = [g - pyr_up(g_next, g.shape) for g, g_next in zip(gauss[:-1], gauss[1:])]
    return Pyramid(bands + [gauss[-1]])


def reconstruct(pyr, clamp=True):
    """Invert :func:`laplacian_pyramid`."""
    if not isinstance(pyr, Pyramid):
        pyr = Pyramid(list(pyr))
    pyr.validate()
    x = np.asarray(pyr.levels[-1], dtype=np.float64)
    for band in reversed(pyr.levels[:-1]):
        x = pyr_up(x, band.shape) + band
    if clamp:
        x = np.clip(x, 0.0, 1.0)
    return x
