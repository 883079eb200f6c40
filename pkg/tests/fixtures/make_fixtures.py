"""Regenerate the bundled test fixtures.

    python tests/fixtures/make_fixtures.py

Writes PNGs with OpenCV directly and computes ``eval/golden.csv`` with the
brute-force oracles, so the committed golden does not depend on mattekit's
metric code. Trimaps for the eval set are written by hand-rolled erosion.
"""
import sys
from pathlib import Path

import cv2
import numpy as np

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE.parent))

import oracles  # noqa: E402

METRICS = ["sad", "mse", "mad", "sad_t", "mse_t", "mad_t", "sad_fg", "sad_bg", "grad", "conn"]


def u8(x):
    return np.round(np.clip(x, 0, 1) * 255).astype(np.uint8)


def write_gray(path, x):
    path.parent.mkdir(parents=True, exist_ok=True)
    cv2.imwrite(str(path), u8(x))


def write_rgb(path, x):
    path.parent.mkdir(parents=True, exist_ok=True)
    cv2.imwrite(str(path), cv2.cvtColor(u8(x), cv2.COLOR_RGB2BGR))


def soft_disk(h, w, cy, cx, r, soft):
    yy, xx = np.mgrid[0:h, 0:w]
    d = np.hypot(yy - cy, xx - cx)
    return np.clip((r - d) / soft + 0.5, 0, 1)


# --------------------------------------------------------------------------


def fb_fixtures():
    """Five 64x64 (F, B, alpha) triples with smooth colours and varied mattes."""
    n = 64
    yy, xx = np.mgrid[0:n, 0:n] / (n - 1)
    rng = np.random.default_rng(2024)
    mattes = [
        soft_disk(n, n, 32, 32, 18, 6),
        np.clip((xx - 0.3) / 0.4, 0, 1),
        np.clip(soft_disk(n, n, 30, 34, 20, 3) * (0.6 + 0.4 * np.sin(xx * 40) ** 2), 0, 1),
        np.maximum(soft_disk(n, n, 20, 18, 10, 4), soft_disk(n, n, 44, 46, 12, 8)),
        np.clip(soft_disk(n, n, 32, 32, 22, 2) + 0.15 * rng.standard_normal((n, n)), 0, 1),
    ]
    for k, a in enumerate(mattes):
        ph = rng.uniform(0, 2 * np.pi, 6)
        F = np.dstack([
            0.5 + 0.35 * np.sin(2 * xx + ph[0]),
            0.5 + 0.35 * np.cos(3 * yy + ph[1]),
            0.4 + 0.3 * xx * yy + 0.1 * np.sin(ph[2]),
        ])
        B = np.dstack([
            0.5 + 0.4 * np.cos(1.5 * yy + ph[3]),
            0.3 + 0.4 * xx,
            0.5 + 0.3 * np.sin(2.5 * (xx + yy) + ph[5]),
        ])
        write_rgb(HERE / "fb" / f"fg{k}.png", F)
        write_rgb(HERE / "fb" / f"bg{k}.png", B)
        write_gray(HERE / "fb" / f"alpha{k}.png", a)


def upscale_fixture():
    """Sharp two-colour guide, its binary matte, and a 4x box-reduced matte."""
    n = 128
    yy, xx = np.mgrid[0:n, 0:n]
    gt = (((xx - 64) / 44.0) ** 2 + ((yy - 60) / 34.0) ** 2 < 1) | ((xx > 90) & (yy > 96))
    gt = gt.astype(float)
    fg = np.array([0.85, 0.62, 0.35])
    bg = np.array([0.15, 0.35, 0.75])
    guide = gt[..., None] * fg + (1 - gt[..., None]) * bg
    low = gt.reshape(32, 4, 32, 4).mean(axis=(1, 3))
    write_rgb(HERE / "upscale" / "guide.png", guide)
    write_gray(HERE / "upscale" / "alpha_gt.png", gt)
    write_gray(HERE / "upscale" / "alpha_low.png", low)


def trimap_of(gt, radius=3):
    fg = oracles.erode_disk(gt >= 0.95, radius)
    bg = oracles.erode_disk(gt <= 0.05, radius)
    t = np.full(gt.shape, 128, dtype=np.uint8)
    t[fg] = 255
    t[bg] = 0
    return t


def eval_fixtures():
    """Five 32x32 prediction/ground-truth pairs with trimaps and a golden CSV."""
    n = 32
    rng = np.random.default_rng(7)
    root = HERE / "eval"
    rows = []
    for k in range(5):
        gt = soft_disk(n, n, 16 + k, 15 - k, 8 + k, 2 + k)
        if k == 0:
            pred = gt.copy()
        elif k == 1:
            pred = np.roll(gt, 1, axis=1)
        elif k == 2:
            pred = np.clip(gt + rng.normal(0, 0.05, gt.shape), 0, 1)
        elif k == 3:
            pred = gt.copy()
            pred[2:5, 26:29] = 1.0  # detached blob
        else:
            pred = np.clip(soft_disk(n, n, 17, 12, 10, 5) * 0.9, 0, 1)
        name = f"img{k}"
        write_gray(root / "pred" / f"{name}.png", pred)
        write_gray(root / "gt" / f"{name}.png", gt)
        # metrics are computed on the 8-bit values actually stored
        pred8 = cv2.imread(str(root / "pred" / f"{name}.png"), cv2.IMREAD_UNCHANGED) / 255.0
        gt8 = cv2.imread(str(root / "gt" / f"{name}.png"), cv2.IMREAD_UNCHANGED) / 255.0
        tri = trimap_of(gt8)
        (root / "trimap").mkdir(parents=True, exist_ok=True)
        cv2.imwrite(str(root / "trimap" / f"{name}.png"), tri)
        sad, mse, mad = oracles.sad_mse_mad(pred8, gt8)
        sad_t, mse_t, mad_t = oracles.sad_mse_mad(pred8, gt8, (tri == 128).astype(int))
        sad_fg = oracles.sad_mse_mad(pred8, gt8, (tri == 255).astype(int))[0]
        sad_bg = oracles.sad_mse_mad(pred8, gt8, (tri == 0).astype(int))[0]
        grad = oracles.gradient_error(pred8, gt8)
        conn = oracles.connectivity_error(pred8, gt8)
        rows.append((name, [sad, mse, mad, sad_t, mse_t, mad_t, sad_fg, sad_bg, grad, conn]))

    lines = ["name," + ",".join(METRICS)]
    for name, vals in rows:
        lines.append(name + "," + ",".join(format(v, ".9g") for v in vals))
    means = [sum(r[1][i] for r in rows) / len(rows) for i in range(len(METRICS))]
    lines.append("mean," + ",".join(format(v, ".9g") for v in means))
    (root / "golden.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def pair16_fixture():
    rng = np.random.default_rng(16)
    gt = soft_disk(16, 16, 8, 7, 5, 2)
    pred = np.clip(gt + rng.normal(0, 0.08, gt.shape), 0, 1)
    pred[0:2, 13:16] = 0.8
    write_gray(HERE / "pair16" / "pred.png", pred)
    write_gray(HERE / "pair16" / "gt.png", gt)
    gt8 = cv2.imread(str(HERE / "pair16" / "gt.png"), cv2.IMREAD_UNCHANGED) / 255.0
    cv2.imwrite(str(HERE / "pair16" / "trimap.png"), trimap_of(gt8, radius=1))


if __name__ == "__main__":
    fb_fixtures()
    upscale_fixture()
    eval_fixtures()
    pair16_fixture()
    print("fixtures written to", HERE)
