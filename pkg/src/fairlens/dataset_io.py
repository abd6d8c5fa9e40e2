"""Dataset manifests: directory scanning, TSV manifests and undersampling."""
from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from fairlens.errors import DatasetError
from fairlens.io import IMAGE_SUFFIXES, atomic_write_text


@dataclass(frozen=True)
class Record:
    path: str
    group: str
    split: Optional[str] = None


@dataclass
class Manifest:
    name: str
    records: list = field(default_factory=list)

    def __post_init__(self):
        paths = [r.path for r in self.records]
        if len(set(paths)) != len(paths):
            raise DatasetError(f"manifest {self.name!r} contains duplicate paths")

    def __len__(self):
        return len(self.records)

    def groups(self) -> "OrderedDict[str, list]":
        """Records per group, groups in first-appearance order."""
        out = OrderedDict()
        for rec in self.records:
            out.setdefault(rec.group, []).append(rec)
        return out

    def group_sizes(self) -> dict:
        return {g: len(rs) for g, rs in self.groups().items()}


def scan_dataset(root) -> Manifest:
    """One group per subdirectory of ``root``; image files sorted by name."""
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset root {root} is not a readable directory")
    try:
        subdirs = sorted(p for p in root.iterdir() if p.is_dir() and not p.name.startswith("."))
    except OSError as exc:
        raise DatasetError(f"cannot list {root}: {exc}") from exc
    if not subdirs:
        raise DatasetError(f"dataset root {root} has no group subdirectories")

    records = []
    for sub in subdirs:
        files = sorted(
            p for p in sub.iterdir()
            if p.is_file() and not p.name.startswith(".") and p.suffix.lower() in IMAGE_SUFFIXES
        )
        records.extend(Record(str(p), sub.name) for p in files)
    if not records:
        raise DatasetError(f"dataset root {root} contains no images")
    return Manifest(root.name, records)


def read_manifest(path) -> Manifest:
    """Parse ``path<TAB>group[<TAB>split]`` lines; ``#`` starts a comment."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DatasetError(f"cannot read manifest {path}: {exc}") from exc
    records = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) not in (2, 3) or not parts[0] or not parts[1]:
            raise DatasetError(f"{path}:{lineno}: expected 'path<TAB>group', got {line!r}")
        records.append(Record(parts[0], parts[1], parts[2] if len(parts) == 3 else None))
    if not records:
        raise DatasetError(f"manifest {path} has no records")
    return Manifest(path.stem, records)


def format_manifest(m: Manifest) -> str:
    lines = []
    for r in m.records:
        cols = [r.path, r.group] + ([r.split] if r.split is not None else [])
        lines.append("\t".join(cols))
    return "".join(line + "\n" for line in lines)


def write_manifest(m: Manifest, path) -> None:
    atomic_write_text(path, format_manifest(m))


def load_manifest(source) -> Manifest:
    """A directory is scanned, anything else is read as a TSV manifest."""
    source = Path(source)
    if source.is_dir():
        return scan_dataset(source)
    return read_manifest(source)


def undersample_balance(m: Manifest, seed: int) -> Manifest:
    """Shrink every group to the smallest group's size.

    Each larger group keeps a seeded uniform sample without replacement; kept
    records stay in their original order. A balanced manifest is returned as is.
    """
    groups = m.groups()
    if not groups:
        raise DatasetError("cannot balance an empty manifest")
    target = min(len(rs) for rs in groups.values())
    if all(len(rs) == target for rs in groups.values()):
        return m
    rng = np.random.default_rng(seed)
    keep = set()
    for label, recs in groups.items():
        if len(recs) == target:
            keep.update(r.path for r in recs)
            continue
        chosen = rng.choice(len(recs), size=target, replace=False)
        keep.update(recs[i].path for i in chosen)
    return Manifest(m.name, [r for r in m.records if r.path in keep])
