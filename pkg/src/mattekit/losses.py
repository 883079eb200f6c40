"""Matting training losses, GAN objective values and the alignment filter."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .composite import FbEstimate, blend
from .errors import ConfigError, DimensionError
from .imagecore import check_image, check_matte, check_same_size, laplacian_pyramid

SCORE_CLAMP = 1e-12


@dataclass(frozen=True)
class LossWeights:
    w_l1: float = 1.0
    w_lap: float = 1.0
    w_comp: float = 10.0

    def __post_init__(self):
        for name in ("w_l1", "w_lap", "w_comp"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ConfigError(f"{name} must be a non-negative number, got {v}")


@dataclass(frozen=True)
class FilterConfig:
    epsilon: float = 0.1
    threshold_t: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0.0 < self.threshold_t <= 1.0:
            raise ConfigError(f"threshold_t must lie in (0, 1], got {self.threshold_t}")


class LossTerms(NamedTuple):
    total: float
    l1: float
    lap: float
    comp: float


def _pair(pred, gt):
    pred = check_matte(pred, "pred")
    gt = check_matte(gt, "gt")
    check_same_size(pred, gt, names=["pred", "gt"])
    return pred, gt


def l1_loss(pred, gt):
    pred, gt = _pair(pred, gt)
    return float(np.mean(np.abs(pred - gt)))


def laplacian_loss(pred, gt, levels=5, stage_weights: Sequence[float] | None = None):
    """Weighted sum over pyramid stages of the mean absolute band difference.

    Stage ``s`` (0 = finest, last = low-pass residue) is weighted ``2**s``
    unless ``stage_weights`` is given.
    """
    pred, gt = _pair(pred, gt)
    lp = laplacian_pyramid(pred, levels)
    lg = laplacian_pyramid(gt, levels)
    if stage_weights is None:
        stage_weights = [2.0**s for s in range(levels)]
    elif len(stage_weights) != levels:
        raise ValueError(f"need {levels} stage weights, got {len(stage_weights)}")
    return float(sum(w * np.mean(np.abs(p - g)) for w, p, g in zip(stage_weights, lp, lg)))


def composition_loss(pred_alpha, fb: FbEstimate, composite):
    """MSE between the re-blended composite and the observed one."""
    pred_alpha = check_matte(pred_alpha, "pred_alpha")
    composite = check_image(composite, "composite")
    check_same_size(pred_alpha, composite, names=["pred_alpha", "composite"])
    recon = blend(fb.foreground, fb.background, pred_alpha)
    return float(np.mean((recon - composite) ** 2))


def total_matting_loss(
    pred, gt, fb: FbEstimate, composite, weights: LossWeights | None = None, levels=5
) -> LossTerms:
    weights = weights or LossWeights()
    l1 = l1_loss(pred, gt)
    lap = laplacian_loss(pred, gt, levels)
    comp = composition_loss(pred, fb, composite)
    total = weights.w_l1 * l1 + weights.w_lap * lap + weights.w_comp * comp
    return LossTerms(float(total), l1, lap, comp)


def score_batch(values, name="scores"):
    """Validate discriminator outputs and clamp them away from 0 and 1."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        raise ValueError(f"{name} batch is empty")
    if not np.isfinite(v).all() or (v < 0).any() or (v > 1).any():
        raise ValueError(f"{name} must lie in (0, 1)")
    return np.clip(v, SCORE_CLAMP, 1.0 - SCORE_CLAMP)


def gan_minimax_value(real, fake):
    """``mean(log D(r)) + mean(log(1 - D(G(z))))`` over score batches."""
    r = score_batch(real, "real")
    f = score_batch(fake, "fake")
    return float(np.mean(np.log(r)) + np.mean(np.log1p(-f)))


def gan_dual_value(real3, real4, fake3, fake4, lam=1.0):
    """Two-discriminator value; real and fake scores are paired by index."""
    if not np.isfinite(lam) or lam < 0:
        raise ValueError(f"lambda must be non-negative, got {lam}")
    r3, r4 = score_batch(real3, "real3"), score_batch(real4, "real4")
    f3, f4 = score_batch(fake3, "fake3"), score_batch(fake4, "fake4")
    if r3.size != r4.size:
        raise DimensionError(f"real3/real4 lengths differ: {r3.size} vs {r4.size}")
    if f3.size != f4.size:
        raise DimensionError(f"fake3/fake4 lengths differ: {f3.size} vs {f4.size}")
    real_term = np.mean(np.log(r3) + lam * np.log(r4))
    fake_term = np.mean(np.log1p(-f3) + np.log1p(-f4))
    return float(real_term + fake_term)


def alignment_agreement(alpha, seg, config: FilterConfig | None = None):
    """Mean disagreement between ``alpha > epsilon`` and a binary mask; ``(distance, accepted)``."""
    config = config or FilterConfig()
    alpha = check_matte(alpha)
    seg = check_matte(seg, "seg")
    check_same_size(alpha, seg, names=["alpha", "seg"])
    if not np.isin(seg, (0.0, 1.0)).all():
        raise ValueError("segmentation mask must be binary (0/1)")
    distance = float(np.mean(np.abs((alpha > config.epsilon).astype(np.float64) - seg)))
    return distance, distance < config.threshold_t
