"""Keep-original augmentation: paste the (possibly augmented) salient region
into one of the eight cells around it, on top of the original or augmented
image."""
from __future__ import annotations

import enum
import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from fairlens.augops import RandAugPolicy, rand_augment
from fairlens.errors import DataError
from fairlens.io import atomic_write_text, read_image, write_image
from fairlens.placement import Placement, choose_region, crop, partition_regions, paste, resize_crop
from fairlens.saliency import DEFAULT_THRESHOLD_FRACTION, Rect, SaliencyConfig, detect_salient_box

log = logging.getLogger(__name__)


class AugmentPart(str, enum.Enum):
    SALIENT = "salient"
    NON_SALIENT = "nonsalient"
    BOTH = "both"


@dataclass(frozen=True)
class PipelineConfig:
    placement: Placement = Placement.RANDOM_AREA
    part: AugmentPart = AugmentPart.BOTH
    policy: RandAugPolicy = field(default_factory=RandAugPolicy)
    radii: Optional[tuple] = None
    threshold_fraction: float = DEFAULT_THRESHOLD_FRACTION
    master_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "placement", Placement(self.placement))
        object.__setattr__(self, "part", AugmentPart(self.part))
        # validates radii and threshold
        SaliencyConfig(self.radii, self.threshold_fraction)

    @property
    def saliency(self) -> SaliencyConfig:
        return SaliencyConfig(self.radii, self.threshold_fraction)


class AugmentResult(NamedTuple):
    image: np.ndarray
    box: Rect
    cell: Optional[Rect]


def augment_with_details(image: np.ndarray, cfg: PipelineConfig,
                         rng: np.random.Generator) -> AugmentResult:
    image = np.asarray(image, dtype=np.uint8)
    h, w = image.shape[:2]
    box = detect_salient_box(image, cfg.saliency).rect
    cell = choose_region(partition_regions(w, h, box), cfg.placement, rng)
    if cell is None:
        return AugmentResult(rand_augment(image, cfg.policy, rng), box, None)

    salient = crop(image, box)
    if cfg.part is AugmentPart.SALIENT:
        base = image
        patch = rand_augment(salient, cfg.policy, rng)
    elif cfg.part is AugmentPart.NON_SALIENT:
        base = rand_augment(image, cfg.policy, rng)
        patch = salient
    else:
        base = rand_augment(image, cfg.policy, rng)
        patch = rand_augment(salient, cfg.policy, rng)
    out = paste(base, resize_crop(patch, cell.width, cell.height), cell)
    return AugmentResult(out, box, cell)


def face_keep_original_augment(image: np.ndarray, cfg: PipelineConfig,
                               rng: np.random.Generator) -> np.ndarray:
    """Augmented copy of ``image``; same shape as the input."""
    return augment_with_details(image, cfg, rng).image


def derive_seed(master_seed: int, index: int) -> int:
    """Stable 63-bit per-item seed, independent of processing order."""
    digest = hashlib.blake2b(f"{int(master_seed)}:{int(index)}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


def _output_names(records) -> list:
    names = [f"{Path(r.path).stem}.png" for r in records]
    seen = {}
    for r, n in zip(records, names):
        seen.setdefault((r.group, n), 0)
        seen[(r.group, n)] += 1
    return [
        n if seen[(r.group, n)] == 1 else f"{Path(n).stem}_{i}.png"
        for i, (r, n) in enumerate(zip(records, names))
    ]


def _augment_one(task) -> dict:
    index, src, out_dir, dst, cfg = task
    seed = derive_seed(cfg.master_seed, index)
    entry = {"src": src, "dst": None, "seed": seed, "box": None, "cell": None, "status": "ok"}
    try:
        image = read_image(src)
        result = augment_with_details(image, cfg, np.random.default_rng(seed))
        write_image(Path(out_dir) / dst, result.image)
    except DataError as exc:
        entry["status"] = f"error: {exc}"
        return entry
    entry["dst"] = dst
    entry["box"] = list(result.box)
    entry["cell"] = list(result.cell) if result.cell is not None else None
    return entry


@dataclass
class AugmentSummary:
    entries: list
    manifest_path: Optional[Path]

    @property
    def failures(self) -> list:
        return [e for e in self.entries if e["status"] != "ok"]


def augment_dataset(manifest, cfg: PipelineConfig, out_dir, workers: int = 1) -> AugmentSummary:
    """Augment every record into ``out_dir/<group>/<stem>.png``.

    Writes ``out_dir/manifest.jsonl`` with one record per input, in input
    order; ``dst`` is relative to ``out_dir``. Unreadable inputs are recorded
    as failures and skipped.
    """
    out_dir = Path(out_dir)
    records = list(manifest.records)
    names = _output_names(records)
    tasks = [
        (i, r.path, str(out_dir), f"{r.group}/{name}", cfg)
        for i, (r, name) in enumerate(zip(records, names))
    ]
    if workers <= 1 or len(tasks) <= 1:
        entries = [_augment_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(_augment_one, tasks))

    for e in entries:
        if e["status"] != "ok":
            log.warning("%s: %s", e["src"], e["status"])
    manifest_path = out_dir / "manifest.jsonl"
    lines = "".join(json.dumps(e, sort_keys=True) + "\n" for e in entries)
    atomic_write_text(manifest_path, lines)
    return AugmentSummary(entries, manifest_path)
