"""Dataset preparation: manifests, background replacement, filtering, augmentation."""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .composite import FbSolverConfig, replace_background
from .imagecore import load_matte, load_rgba, resample, save_rgba
from .losses import FilterConfig, alignment_agreement

SPLITS = ("train", "val", "test")


class ManifestError(ValueError):
    pass


@dataclass
class ManifestEntry:
    image: str
    alpha: str | None = None
    seg: str | None = None
    split: str = "train"
    instance_count: int | None = None

    def to_dict(self):
        return {k: v for k, v in asdict(self).items() if v is not None}


@dataclass
class DatasetManifest:
    root: str
    entries: list[ManifestEntry] = field(default_factory=list)

    def __post_init__(self):
        self.validate()

    def validate(self):
        seen = set()
        for e in self.entries:
            if e.split not in SPLITS:
                raise ManifestError(f"{e.image}: split must be one of {SPLITS}, got {e.split!r}")
            for p in (e.image, e.alpha, e.seg):
                if p is not None and os.path.isabs(p):
                    raise ManifestError(f"manifest paths must be relative to root, got {p!r}")
            if e.image in seen:
                raise ManifestError(f"duplicate image path {e.image!r}")
            seen.add(e.image)

    def path(self, rel):
        return Path(self.root) / rel

    def sorted(self):
        return replace(self, entries=sorted(self.entries, key=lambda e: e.image))

    def to_dict(self):
        return {"root": self.root, "entries": [e.to_dict() for e in self.entries]}

    @classmethod
    def from_dict(cls, data, base_dir="."):
        if not isinstance(data, dict) or "root" not in data or "entries" not in data:
            raise ManifestError("manifest must be an object with 'root' and 'entries'")
        root = data["root"]
        if not os.path.isabs(root):
            root = os.path.normpath(os.path.join(base_dir, root))
        known = {"image", "alpha", "seg", "split", "instance_count"}
        entries = []
        for raw in data["entries"]:
            extra = set(raw) - known
            if extra or "image" not in raw:
                raise ManifestError(f"bad manifest entry {raw!r}")
            entries.append(ManifestEntry(**raw))
        return cls(root, entries)


def load_manifest(path):
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"{path}: invalid JSON ({exc})") from None
    return DatasetManifest.from_dict(data, base_dir=path.parent)


def save_manifest(manifest: DatasetManifest, path):
    """Write ``manifest`` as JSON with ``root`` stored relative to the file."""
    path = Path(path)
    data = manifest.to_dict()
    data["root"] = os.path.relpath(os.path.abspath(manifest.root), os.path.abspath(path.parent or "."))
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


# --------------------------------------------------------------------------
# batch execution


def _guarded(fn, job):
    try:
        return True, fn(job)
    except Exception as exc:  # isolate per-entry failures
        return False, f"{type(exc).__name__}: {exc}"


def run_jobs(fn, jobs, workers=1):
    """Apply ``fn`` to each job, returning ``(ok, result_or_message)`` in job order."""
    jobs = list(jobs)
    if workers <= 1 or len(jobs) <= 1:
        return [_guarded(fn, j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(_guarded, [fn] * len(jobs), jobs))


def list_pngs(directory):
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"no such directory: {directory}")
    return sorted(p for p in directory.iterdir() if p.suffix.lower() == ".png" and p.is_file())


def load_entry_alpha(manifest: DatasetManifest, entry: ManifestEntry):
    """Image and matte for an entry; the matte may be embedded as the PNG alpha."""
    image, embedded = load_rgba(manifest.path(entry.image))
    if entry.alpha is not None:
        alpha = load_matte(manifest.path(entry.alpha))
    elif embedded is not None:
        alpha = embedded
    else:
        raise ValueError("missing alpha")
    if alpha.shape != image.shape[:2]:
        raise ValueError(f"alpha size {alpha.shape} does not match image {image.shape[:2]}")
    return image, alpha


# --------------------------------------------------------------------------
# background replacement


def pick_background(backgrounds, seed, index):
    rng = np.random.default_rng([int(seed), int(index)])
    return backgrounds[int(rng.integers(len(backgrounds)))]


def _composite_one(job):
    manifest, entry, bg_path, out_path, solver = job
    image, alpha = load_entry_alpha(manifest, entry)
    bg, _ = load_rgba(bg_path)
    bg = resample(bg, image.shape[1], image.shape[0], "bilinear")
    out = replace_background(image, alpha, bg, solver)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_rgba(out_path, out, alpha)
    return ManifestEntry(image=str(Path(entry.image).with_suffix(".png")), split=entry.split)


def build_composites(manifest: DatasetManifest, backgrounds, out, solver=None, seed=0, workers=1):
    """Blend every entry's estimated foreground over a seeded background choice.

    Returns ``(output_manifest, failures)`` where failures is a list of
    ``{"entry", "error"}`` records. Output RGBA files mirror the input layout
    under ``out``.
    """
    pool = list_pngs(backgrounds)
    if not pool:
        raise ValueError(f"background directory {backgrounds} contains no PNG files")
    solver = solver or FbSolverConfig()
    out = Path(out)
    manifest = manifest.sorted()
    jobs = [
        (manifest, e, pick_background(pool, seed, i), out / Path(e.image).with_suffix(".png"), solver)
        for i, e in enumerate(manifest.entries)
    ]
    entries, failures = [], []
    for entry, (ok, res) in zip(manifest.entries, run_jobs(_composite_one, jobs, workers)):
        if ok:
            entries.append(res)
        else:
            failures.append({"entry": entry.image, "error": res})
    return DatasetManifest(str(out), entries), failures


# --------------------------------------------------------------------------
# alignment filter


def _filter_one(job):
    manifest, entry, config = job
    if entry.seg is None:
        raise ValueError("missing seg mask")
    _, alpha = load_entry_alpha(manifest, entry)
    seg = load_matte(manifest.path(entry.seg))
    return alignment_agreement(alpha, seg, config)


def filter_dataset(manifest: DatasetManifest, config: FilterConfig | None = None, workers=1):
    """Split entries by the alignment-agreement test.

    Returns ``(kept, rejected, report)``. Entries that fail to load go to
    ``rejected`` and carry an ``error`` in the report.
    """
    config = config or FilterConfig()
    manifest = manifest.sorted()
    results = run_jobs(_filter_one, [(manifest, e, config) for e in manifest.entries], workers)
    kept, rejected, report = [], [], []
    for entry, (ok, res) in zip(manifest.entries, results):
        if ok:
            distance, accepted = res
            (kept if accepted else rejected).append(entry)
            report.append({"entry": entry.image, "distance": distance, "accepted": bool(accepted)})
        else:
            rejected.append(entry)
            report.append({"entry": entry.image, "distance": None, "accepted": False, "error": res})
    return (
        DatasetManifest(manifest.root, kept),
        DatasetManifest(manifest.root, rejected),
        report,
    )


def load_instance_counts(path):
    """Read a ``{image_path: count}`` JSON sidecar, e.g. written by a person detector."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or not all(isinstance(v, int) and v >= 0 for v in data.values()):
        raise ManifestError(f"{path}: instance counts must map image paths to non-negative integers")
    return data


def select_single_instance(manifest: DatasetManifest, counts: dict | None = None):
    """Keep entries whose externally counted instances equal one.

    ``counts`` maps image paths to counts (e.g. a detector's sidecar file);
    it overrides each entry's ``instance_count``. Entries with no count are
    dropped.
    """
    counts = counts or {}
    kept, dropped = [], []
    for e in manifest.entries:
        n = counts.get(e.image, e.instance_count)
        (kept if n == 1 else dropped).append(e)
    return DatasetManifest(manifest.root, kept), DatasetManifest(manifest.root, dropped)


# --------------------------------------------------------------------------
# augmentation


@dataclass(frozen=True)
class AugmentConfig:
    horizontal_flip_prob: float = 0.5
    crop_size: int | tuple[int, int] | None = None
    background_pool: str | None = None
    seed: int = 0
    solver: FbSolverConfig = field(default_factory=FbSolverConfig)

    def __post_init__(self):
        if not 0.0 <= self.horizontal_flip_prob <= 1.0:
            raise ValueError(f"horizontal_flip_prob must lie in [0, 1], got {self.horizontal_flip_prob}")

    def rng(self):
        return np.random.default_rng(self.seed)


def _crop_hw(crop_size):
    if isinstance(crop_size, (tuple, list)):
        return int(crop_size[0]), int(crop_size[1])
    return int(crop_size), int(crop_size)


def augment(image, alpha, config: AugmentConfig, rng: np.random.Generator | None = None):
    """Random horizontal flip, crop and background swap applied to a pair.

    All randomness comes from ``rng`` (default: a generator seeded from
    ``config.seed``): one uniform draw for the flip, then the crop offsets,
    then the background index.
    """
    rng = rng if rng is not None else config.rng()
    image = np.asarray(image, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)

    if rng.random() < config.horizontal_flip_prob:
        image = image[:, ::-1]
        alpha = alpha[:, ::-1]

    if config.crop_size is not None:
        ch, cw = _crop_hw(config.crop_size)
        h, w = alpha.shape
        if not (1 <= ch <= h and 1 <= cw <= w):
            raise ValueError(f"crop size {cw}x{ch} does not fit a {w}x{h} image")
        top = int(rng.integers(0, h - ch + 1))
        left = int(rng.integers(0, w - cw + 1))
        image = image[top : top + ch, left : left + cw]
        alpha = alpha[top : top + ch, left : left + cw]

    if config.background_pool is not None:
        pool = list_pngs(config.background_pool)
        if not pool:
            raise ValueError(f"background pool {config.background_pool} is empty")
        bg, _ = load_rgba(pool[int(rng.integers(len(pool)))])
        image = replace_background(image, alpha, bg, config.solver)

    return np.ascontiguousarray(image), np.ascontiguousarray(alpha)
