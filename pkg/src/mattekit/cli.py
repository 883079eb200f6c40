"""Command-line front end: ``mattekit <command> ...``.

Option values are resolved as command-line flag, then the ``--config`` JSON
file (same keys as the flag names, dashes or underscores), then defaults.
Diagnostics go to stderr; exit status is 0 only when nothing failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from . import kernels
from .composite import FbEstimate, FbSolverConfig, estimate_fb
from .errors import MatteKitError
from .guidedfilter import GuidedFilterConfig, fast_guided_filter, upscale_alpha
from .imagecore import load_matte, load_rgba, save_matte, save_rgba
from .losses import (
    FilterConfig,
    LossWeights,
    gan_dual_value,
    gan_minimax_value,
    l1_loss,
    laplacian_loss,
    total_matting_loss,
)
from .metrics import MetricReport, evaluate
from .pipeline import (
    build_composites,
    filter_dataset,
    list_pngs,
    load_manifest,
    run_jobs,
    save_manifest,
    write_json,
)
from .trimap import TrimapConfig, generate_trimap, load_trimap, save_trimap

DEFAULTS = {
    "workers": None,  # resolved from MATTEKIT_WORKERS / CPU count
    "seed": 0,
    "smoothness": 1.0,
    "iterations": 10,
    "coarsest_size": 4,
    "fg_threshold": 0.95,
    "bg_threshold": 0.05,
    "band_radius": 10,
    "epsilon": 0.1,
    "t": 0.1,
    "method": "fast_guided",
    "radius": 8,
    "eps": 1e-4,
    "subsample": None,
    "levels": 5,
    "w_l1": 1.0,
    "w_lap": 1.0,
    "w_comp": 10.0,
    "lam": 1.0,
    "size": 256,
    "iters": 3,
}


class CommandError(MatteKitError):
    pass


def _fmt(v):
    return format(float(v), ".9g")


def default_workers():
    env = os.environ.get("MATTEKIT_WORKERS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise CommandError(f"MATTEKIT_WORKERS must be an integer, got {env!r}") from None
        if n < 1:
            raise CommandError("MATTEKIT_WORKERS must be >= 1")
        return n
    return os.cpu_count() or 1


def resolve(args):
    """Fill unset options from the config file, then from ``DEFAULTS``."""
    config = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            config = {k.replace("-", "_"): v for k, v in json.load(fh).items()}
    for key, default in DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, config.get(key, default))
    if hasattr(args, "workers"):
        if args.workers is None:
            args.workers = default_workers()
        if int(args.workers) < 1:
            raise CommandError("--workers must be >= 1")
        args.workers = int(args.workers)
    return args


def _solver(args):
    return FbSolverConfig(
        smoothness_weight=float(args.smoothness),
        iterations_per_level=int(args.iterations),
        coarsest_size=int(args.coarsest_size),
    )


def _trimap_config(args):
    return TrimapConfig(
        fg_threshold=float(args.fg_threshold),
        bg_threshold=float(args.bg_threshold),
        band_radius=int(args.band_radius),
    )


def _warn(msg):
    print(f"mattekit: {msg}", file=sys.stderr)


# --------------------------------------------------------------------------
# eval


def _eval_one(job):
    name, pred_path, gt_path, trimap_path, tri_cfg = job
    pred = load_matte(pred_path)
    gt = load_matte(gt_path)
    trimap = load_trimap(trimap_path) if trimap_path else generate_trimap(gt, tri_cfg)
    return evaluate(pred, gt, trimap)


def eval_csv(rows):
    """CSV text for ``rows`` (``(name, MetricReport)`` pairs) plus a mean footer."""
    names = MetricReport.names()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name"] + names)
    rows = sorted(rows, key=lambda r: r[0])
    for name, rep in rows:
        writer.writerow([name] + [_fmt(getattr(rep, k)) for k in names])
    if rows:
        means = [sum(getattr(rep, k) for _, rep in rows) / len(rows) for k in names]
        writer.writerow(["mean"] + [_fmt(m) for m in means])
    return buf.getvalue()


def cmd_eval(args):
    pred_dir, gt_dir = Path(args.pred_dir), Path(args.gt_dir)
    preds = {p.stem: p for p in list_pngs(pred_dir)}
    gts = {p.stem: p for p in list_pngs(gt_dir)}
    tris = {p.stem: p for p in list_pngs(args.trimaps)} if args.trimaps else None
    tri_cfg = _trimap_config(args)

    failures, jobs = [], []
    for name in sorted(set(preds) | set(gts)):
        if name not in preds:
            failures.append((name, "prediction missing"))
        elif name not in gts:
            failures.append((name, "ground truth missing"))
        elif tris is not None and name not in tris:
            failures.append((name, "trimap missing"))
        else:
            jobs.append((name, preds[name], gts[name], tris[name] if tris is not None else None, tri_cfg))

    rows = []
    for job, (ok, res) in zip(jobs, run_jobs(_eval_one, jobs, args.workers)):
        if ok:
            rows.append((job[0], res))
        else:
            failures.append((job[0], res))

    Path(args.out).write_text(eval_csv(rows), encoding="utf-8")
    for name, err in sorted(failures):
        _warn(f"{name}: {err}")
    return 1 if failures else 0


# --------------------------------------------------------------------------
# dataset commands


def cmd_composite(args):
    manifest = load_manifest(args.manifest)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result, failures = build_composites(
        manifest, args.backgrounds, out, solver=_solver(args), seed=int(args.seed), workers=args.workers
    )
    save_manifest(result, out / "manifest.json")
    write_json(args.failures or out / "failures.json", failures)
    for f in failures:
        _warn(f"{f['entry']}: {f['error']}")
    return 1 if failures else 0


def cmd_extract_fg(args):
    image, embedded = load_rgba(args.image)
    alpha = load_matte(args.alpha) if args.alpha else embedded
    if alpha is None:
        raise CommandError(f"{args.image} has no alpha channel and no --alpha was given")
    fb = estimate_fb(image, alpha, _solver(args))
    save_rgba(args.out, fb.foreground, alpha)
    if args.background_out:
        save_rgba(args.background_out, fb.background)
    return 0


def cmd_trimap(args):
    cfg = _trimap_config(args)
    src = Path(args.alpha)
    if src.is_dir():
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        failed = 0
        for p in list_pngs(src):
            try:
                save_trimap(out / p.name, generate_trimap(load_matte(p), cfg))
            except (MatteKitError, OSError, ValueError) as exc:
                _warn(f"{p.name}: {exc}")
                failed += 1
        return 1 if failed else 0
    save_trimap(args.out, generate_trimap(load_matte(src), cfg))
    return 0


def cmd_filter(args):
    manifest = load_manifest(args.manifest)
    cfg = FilterConfig(epsilon=float(args.epsilon), threshold_t=float(args.t))
    kept, rejected, report = filter_dataset(manifest, cfg, workers=args.workers)
    save_manifest(kept, args.kept)
    save_manifest(rejected, args.rejected)
    write_json(args.report, report)
    errors = [r for r in report if "error" in r]
    for r in errors:
        _warn(f"{r['entry']}: {r['error']}")
    return 1 if errors else 0


def cmd_upsample(args):
    low = load_matte(args.alpha_low)
    guide, _ = load_rgba(args.guide)
    cfg = GuidedFilterConfig(radius=int(args.radius), epsilon=float(args.eps), subsample=int(args.subsample or 1))
    if args.method == "fast_guided" and args.subsample:
        out = fast_guided_filter(guide, low, cfg)
    else:
        out = upscale_alpha(low, guide, args.method, cfg)
    save_matte(args.out, out)
    return 0


# --------------------------------------------------------------------------
# loss


def _scores(text):
    if text is None:
        return None
    return [float(v) for v in text.replace(",", " ").split()]


def cmd_loss(args):
    out = {}
    if args.pred or args.gt:
        if not (args.pred and args.gt):
            raise CommandError("--pred and --gt must be given together")
        pred, gt = load_matte(args.pred), load_matte(args.gt)
        levels = int(args.levels)
        if args.composite:
            if not (args.fg and args.bg):
                raise CommandError("--composite needs --fg and --bg")
            composite, _ = load_rgba(args.composite)
            fb = FbEstimate(load_rgba(args.fg)[0], load_rgba(args.bg)[0])
            weights = LossWeights(float(args.w_l1), float(args.w_lap), float(args.w_comp))
            out["matting"] = total_matting_loss(pred, gt, fb, composite, weights, levels)._asdict()
        else:
            out["matting"] = {"l1": l1_loss(pred, gt), "lap": laplacian_loss(pred, gt, levels)}
    if args.real or args.fake:
        real, fake = _scores(args.real), _scores(args.fake)
        if real is None or fake is None:
            raise CommandError("--real and --fake must be given together")
        out["gan_minimax"] = gan_minimax_value(real, fake)
        if args.real4 or args.fake4:
            out["gan_dual"] = gan_dual_value(
                real, _scores(args.real4) or [], fake, _scores(args.fake4) or [], float(args.lam)
            )
    if not out:
        raise CommandError("nothing to compute: give --pred/--gt and/or --real/--fake")
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


# --------------------------------------------------------------------------
# bench


def _time(fn, iters):
    samples = []
    for _ in range(iters):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    mean = statistics.fmean(samples)
    std = statistics.stdev(samples) if len(samples) > 1 else 0.0
    return mean, std


def bench_inputs(size, seed=0):
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size] / size
    gt = np.clip((0.35 - np.hypot(xx - 0.5, yy - 0.5)) * 12 + 0.5, 0, 1)
    pred = np.clip(gt + rng.normal(0, 0.05, gt.shape), 0, 1)
    image = np.clip(np.dstack([xx, yy, 1 - xx]) * 0.8 + rng.random((size, size, 3)) * 0.2, 0, 1)
    return pred, gt, image


def cmd_bench(args):
    size, iters = int(args.size), int(args.iters)
    if size < 16:
        raise CommandError("--size must be >= 16")
    if iters < 1:
        raise CommandError("--iters must be >= 1")
    pred, gt, image = bench_inputs(size)
    trimap = generate_trimap(gt)
    low = gt[::4, ::4].copy()
    guide = image[: low.shape[0] * 4, : low.shape[1] * 4]
    solver = FbSolverConfig()

    def ops(backend=None):
        return [
            ("metric suite", lambda: evaluate(pred, gt, trimap)),
            ("fast guided filter x4", lambda: fast_guided_filter(guide, low, backend=backend)),
            ("fb solver", lambda: estimate_fb(image, gt, solver, backend=backend)),
        ]

    print(f"size {size}x{size}, {iters} iteration(s), active backend: {kernels.BACKEND}")
    print(f"{'operation':<24}{'mean s':>12}{'std s':>12}")
    for name, fn in ops():
        mean, std = _time(fn, iters)
        print(f"{name:<24}{mean:>12.4f}{std:>12.4f}")

    backends = sorted(kernels.BACKENDS)
    print()
    print(f"{'kernel backends':<24}" + "".join(f"{b + ' s':>12}" for b in backends))
    for name, _ in ops()[1:]:
        means = [_time(dict(ops(b))[name], iters)[0] for b in backends]
        print(f"{name:<24}" + "".join(f"{m:>12.4f}" for m in means))
    return 0


# --------------------------------------------------------------------------
# parser


def _add_solver(p):
    p.add_argument("--smoothness", type=float, help="F/B smoothness weight (default 1.0)")
    p.add_argument("--iterations", type=int, help="Gauss-Seidel sweeps per level (default 10)")
    p.add_argument("--coarsest-size", type=int, help="coarsest pyramid side (default 4)")


def _add_trimap(p):
    p.add_argument("--fg-threshold", type=float, help="default 0.95")
    p.add_argument("--bg-threshold", type=float, help="default 0.05")
    p.add_argument("--band-radius", type=int, help="erosion radius in pixels (default 10)")


def _add_workers(p):
    p.add_argument("--workers", type=int, help="worker processes (default $MATTEKIT_WORKERS or CPU count)")


def build_parser():
    parser = argparse.ArgumentParser(prog="mattekit", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file with option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate predicted mattes against ground truth")
    p.add_argument("pred_dir")
    p.add_argument("gt_dir")
    p.add_argument("--trimaps", help="directory of trimaps; generated from gt when omitted")
    p.add_argument("-o", "--out", required=True, help="output CSV")
    _add_trimap(p)
    _add_workers(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("composite", help="replace backgrounds for a manifest")
    p.add_argument("manifest")
    p.add_argument("backgrounds")
    p.add_argument("out_dir")
    p.add_argument("--seed", type=int)
    p.add_argument("--failures", help="failure summary JSON (default OUT_DIR/failures.json)")
    _add_solver(p)
    _add_workers(p)
    p.set_defaults(func=cmd_composite)

    p = sub.add_parser("extract-fg", help="estimate the foreground of one image")
    p.add_argument("image")
    p.add_argument("out")
    p.add_argument("--alpha", help="matte PNG; defaults to the image's alpha channel")
    p.add_argument("--background-out")
    _add_solver(p)
    p.set_defaults(func=cmd_extract_fg)

    p = sub.add_parser("trimap", help="generate trimaps from mattes")
    p.add_argument("alpha", help="matte PNG or directory")
    p.add_argument("out", help="trimap PNG or directory")
    _add_trimap(p)
    p.set_defaults(func=cmd_trimap)

    p = sub.add_parser("filter", help="alignment-agreement filter for a manifest")
    p.add_argument("manifest")
    p.add_argument("--epsilon", type=float, help="binarisation level (default 0.1)")
    p.add_argument("--t", type=float, help="acceptance threshold (default 0.1)")
    p.add_argument("--kept", required=True)
    p.add_argument("--rejected", required=True)
    p.add_argument("--report", required=True)
    _add_workers(p)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("upsample", help="upscale a low-resolution matte")
    p.add_argument("alpha_low")
    p.add_argument("guide")
    p.add_argument("out")
    p.add_argument("--method", choices=("bilinear", "fast_guided"))
    p.add_argument("--radius", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--subsample", type=int, help="default: size ratio of guide to matte")
    p.set_defaults(func=cmd_upsample)

    p = sub.add_parser("bench", help="time the metric suite, guided filter and F/B solver")
    p.add_argument("--size", type=int)
    p.add_argument("--iters", type=int)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("loss", help="print matting losses and/or GAN objective values")
    p.add_argument("--pred")
    p.add_argument("--gt")
    p.add_argument("--composite")
    p.add_argument("--fg")
    p.add_argument("--bg")
    p.add_argument("--levels", type=int)
    p.add_argument("--w-l1", type=float)
    p.add_argument("--w-lap", type=float)
    p.add_argument("--w-comp", type=float)
    p.add_argument("--real", help="comma-separated discriminator scores on real samples")
    p.add_argument("--fake", help="comma-separated discriminator scores on generated samples")
    p.add_argument("--real4", help="second-discriminator scores on real samples")
    p.add_argument("--fake4", help="second-discriminator scores on generated samples")
    p.add_argument("--lam", type=float, help="second-discriminator weight (default 1.0)")
    p.set_defaults(func=cmd_loss)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        resolve(args)
        return args.func(args)
    except (MatteKitError, OSError, ValueError, json.JSONDecodeError) as exc:
        _warn(str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
