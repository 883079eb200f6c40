"""Alpha blending and multi-level foreground/background estimation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import kernels
from .errors import ConfigError
from .imagecore import check_image, check_matte, check_same_size, resample, resize_unclamped


class FbEstimate(NamedTuple):
    foreground: np.ndarray
    background: np.ndarray


@dataclass(frozen=True)
class FbSolverConfig:
    smoothness_weight: float = 1.0
    iterations_per_level: int = 10
    coarsest_size: int = 4
    # successive over-relaxation factor; 1.0 is plain Gauss-Seidel
    relaxation: float = 1.6

    def __post_init__(self):
        if not np.isfinite(self.smoothness_weight) or self.smoothness_weight < 0:
            raise ConfigError(f"smoothness_weight must be >= 0, got {self.smoothness_weight}")
        if int(self.iterations_per_level) != self.iterations_per_level or self.iterations_per_level < 1:
            raise ConfigError(f"iterations_per_level must be an integer >= 1, got {self.iterations_per_level}")
        if int(self.coarsest_size) != self.coarsest_size or self.coarsest_size < 2:
            raise ConfigError(f"coarsest_size must be an integer >= 2, got {self.coarsest_size}")
        if not 0.0 < self.relaxation < 2.0:
            raise ConfigError(f"relaxation must lie in (0, 2), got {self.relaxation}")


def blend(foreground, background, alpha):
    """Composite ``alpha * F + (1 - alpha) * B``."""
    F = check_image(foreground, "foreground")
    B = check_image(background, "background")
    a = check_matte(alpha)
    check_same_size(F, B, a, names=["foreground", "background", "alpha"])
    a3 = a[..., None]
    # B + a(F - B) is exact for a == 0 and for F == B; a == 1 is patched below
    out = B + a3 * (F - B)
    out = np.where(a3 == 1.0, F, out)
    return np.clip(out, 0.0, 1.0)


def fb_energy(F, B, C, alpha, lam):
    """Data term of the blend equation plus 4-neighbour smoothness on F and B."""
    a = alpha[..., None]
    data = np.sum((a * F + (1.0 - a) * B - C) ** 2)
    smooth = 0.0
    for X in (F, B):
        smooth += np.sum((X[1:] - X[:-1]) ** 2) + np.sum((X[:, 1:] - X[:, :-1]) ** 2)
    return float(data + lam * smooth)


def level_sizes(height, width, coarsest_size):
    """Grid sizes from coarsest to finest; halving stops once min side <= coarsest_size."""
    sizes = [(height, width)]
    while min(sizes[-1]) > coarsest_size:
        h, w = sizes[-1]
        sizes.append((-(-h // 2), -(-w // 2)))
    return sizes[::-1]


def estimate_fb(
    composite,
    alpha,
    config: FbSolverConfig | None = None,
    on_sweep: Callable[[int, int, float], None] | None = None,
    backend: str | None = None,
    initial: FbEstimate | None = None,
) -> FbEstimate:
    """Estimate foreground and background colours from a composite and its matte.

    Coarse-to-fine over-relaxed Gauss-Seidel (red-black order) on the
    quadratic energy of :func:`fb_energy`. Each pixel's (F, B) pair is a 2x2
    block solved exactly, so every sweep lowers the energy for any
    relaxation in (0, 2). If ``on_sweep`` is given it is called as
    ``on_sweep(level, sweep, energy)`` before the first sweep of each level
    (``sweep == 0``) and after every sweep.

    With ``initial`` the pyramid is skipped and the sweeps start from the
    given estimate at full resolution.
    """
    config = config or FbSolverConfig()
    C = check_image(composite, "composite")
    a = check_matte(alpha)
    check_same_size(C, a, names=["composite", "alpha"])
    h, w = a.shape
    lam = float(config.smoothness_weight)

    F = B = None
    sizes = level_sizes(h, w, config.coarsest_size)
    if initial is not None:
        F = check_image(initial.foreground, "initial foreground").copy()
        B = check_image(initial.background, "initial background").copy()
        check_same_size(C, F, B, names=["composite", "initial foreground", "initial background"])
        sizes = sizes[-1:]
    for level, (lh, lw) in enumerate(sizes):
        C_l = np.ascontiguousarray(resize_unclamped(C, lw, lh, "box"))
        a_l = np.ascontiguousarray(resize_unclamped(a, lw, lh, "box"))
        if F is None:
            F = C_l.copy()
            B = C_l.copy()
        elif F.shape[:2] != (lh, lw):
            F = np.ascontiguousarray(resize_unclamped(F, lw, lh, "bilinear"), dtype=np.float64).copy()
            B = np.ascontiguousarray(resize_unclamped(B, lw, lh, "bilinear"), dtype=np.float64).copy()
        if on_sweep is not None:
            on_sweep(level, 0, fb_energy(F, B, C_l, a_l, lam))
        for sweep in range(1, config.iterations_per_level + 1):
            kernels.rb_sweep(F, B, C_l, a_l, lam, 0, config.relaxation, backend)
            kernels.rb_sweep(F, B, C_l, a_l, lam, 1, config.relaxation, backend)
            if on_sweep is not None:
                on_sweep(level, sweep, fb_energy(F, B, C_l, a_l, lam))

    return FbEstimate(np.clip(F, 0.0, 1.0), np.clip(B, 0.0, 1.0))


def replace_background(composite, alpha, new_background, config: FbSolverConfig | None = None):
    """Re-composite the estimated foreground over ``new_background``."""
    C = check_image(composite, "composite")
    a = check_matte(alpha)
    bg = check_image(new_background, "new_background")
    if bg.shape[:2] != C.shape[:2]:
        bg = resample(bg, C.shape[1], C.shape[0], "bilinear")
    fb = estimate_fb(C, a, config)
    return blend(fb.foreground, bg, a)
