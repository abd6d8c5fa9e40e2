"""Image embeddings and the precomputed feature file format.

The built-in extractors are color histograms (optionally weighted by the
saliency map); any external extractor can be plugged in by writing a feature
file::

    #dim=4
    img001,male,0.1,0.2,0.3,0.4
    img002,female,0.5,0.1,0.0,0.2

Vectors are unit-normalized on load.
"""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from fairlens.errors import ConfigError, EmptyInputError, FeatureFileError, NormalizationError
from fairlens.io import atomic_write_text, read_image
from fairlens.saliency import SaliencyConfig, fine_grained_saliency, to_grayscale

DEFAULT_BINS = 16


def l2_normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    norm = np.linalg.norm(v)
    if not norm > 0 or not np.isfinite(norm):
        raise NormalizationError("cannot normalize a zero or non-finite vector")
    return v / norm


def normalize_rows(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1)
    bad = ~(norms > 0) | ~np.isfinite(norms)
    if bad.any():
        raise NormalizationError(f"row {int(np.argmax(bad))} has zero or non-finite norm")
    return x / norms[:, None]


def _check_bins(bins: int) -> None:
    if bins < 2:
        raise ConfigError(f"bins must be >= 2, got {bins}")


def _channel_histograms(image: np.ndarray, bins: int, weights=None) -> np.ndarray:
    image = np.asarray(image, dtype=np.uint8)
    if image.ndim != 3 or image.shape[0] == 0 or image.shape[1] == 0:
        raise EmptyInputError(f"cannot embed an image of shape {image.shape}")
    idx = image.reshape(-1, image.shape[2]).astype(np.intp) * bins // 256
    w = None if weights is None else np.asarray(weights, dtype=np.float64).ravel()
    hists = [np.bincount(idx[:, c], weights=w, minlength=bins) for c in range(idx.shape[1])]
    return np.concatenate(hists).astype(np.float64)


def embed_histogram(image: np.ndarray, bins: int = DEFAULT_BINS) -> np.ndarray:
    """Concatenated per-channel histograms (``3 * bins`` values), unit length."""
    _check_bins(bins)
    h = _channel_histograms(image, bins)
    return l2_normalize(h / (image.shape[0] * image.shape[1]))


def embed_saliency_weighted(image: np.ndarray, bins: int = DEFAULT_BINS,
                            saliency: Optional[SaliencyConfig] = None,
                            saliency_map: Optional[np.ndarray] = None) -> np.ndarray:
    """Histogram where each pixel counts with its saliency score.

    Pass ``saliency_map`` to skip saliency detection. A map with no mass (a
    constant image, for instance) falls back to the plain histogram.
    """
    _check_bins(bins)
    if saliency_map is None:
        cfg = saliency or SaliencyConfig()
        saliency_map = fine_grained_saliency(to_grayscale(image), cfg.radii)
    if saliency_map.shape != image.shape[:2]:
        raise ConfigError(
            f"saliency map shape {saliency_map.shape} does not match image {image.shape[:2]}")
    if not np.any(saliency_map > 0):
        return embed_histogram(image, bins)
    h = _channel_histograms(image, bins, weights=saliency_map)
    return l2_normalize(h / (image.shape[0] * image.shape[1]))


@dataclass(frozen=True)
class EmbeddingSpec:
    kind: str = "saliency"
    bins: int = DEFAULT_BINS
    radii: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in ("histogram", "saliency"):
            raise ConfigError(f"unknown embedding kind {self.kind!r}")
        _check_bins(self.bins)

    @property
    def dim(self) -> int:
        return 3 * self.bins


def embed_image(image: np.ndarray, spec: EmbeddingSpec) -> np.ndarray:
    if spec.kind == "histogram":
        return embed_histogram(image, spec.bins)
    return embed_saliency_weighted(image, spec.bins, SaliencyConfig(radii=spec.radii))


def _embed_path(args):
    path, spec = args
    return embed_image(read_image(path), spec)


def embed_paths(paths: Sequence[str], spec: EmbeddingSpec, workers: int = 1) -> np.ndarray:
    """Embed image files into an ``n x dim`` matrix, rows in input order."""
    tasks = [(str(p), spec) for p in paths]
    if not tasks:
        return np.zeros((0, spec.dim))
    if workers <= 1:
        rows = [_embed_path(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_embed_path, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    return np.vstack(rows)


@dataclass
class FeatureTable:
    labels: list
    groups: list
    vectors: np.ndarray

    def __len__(self):
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def by_group(self) -> dict:
        """Group label -> row matrix, groups in first-appearance order."""
        out = {}
        for i, g in enumerate(self.groups):
            out.setdefault(g, []).append(i)
        return {g: self.vectors[idx] for g, idx in out.items()}


def load_precomputed(path) -> FeatureTable:
    """Read a feature file; raises :class:`FeatureFileError` on malformed input."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise FeatureFileError(f"cannot read feature file {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#dim="):
        raise FeatureFileError(f"{path}: first line must be '#dim=<d>'")
    try:
        dim = int(lines[0][len("#dim="):])
    except ValueError:
        raise FeatureFileError(f"{path}: bad header {lines[0]!r}") from None
    if dim < 1:
        raise FeatureFileError(f"{path}: dimension must be positive")

    labels, groups, rows = [], [], []
    for lineno, row in enumerate(csv.reader(lines[1:]), 2):
        if not row:
            continue
        if len(row) != dim + 2:
            raise FeatureFileError(
                f"{path}:{lineno}: expected {dim} values, got {len(row) - 2}")
        try:
            values = [float(v) for v in row[2:]]
        except ValueError as exc:
            raise FeatureFileError(f"{path}:{lineno}: {exc}") from None
        try:
            rows.append(l2_normalize(values))
        except NormalizationError as exc:
            raise FeatureFileError(f"{path}:{lineno}: {exc}") from None
        labels.append(row[0])
        groups.append(row[1])
    vectors = np.vstack(rows) if rows else np.zeros((0, dim))
    return FeatureTable(labels, groups, vectors)


def format_features(table: FeatureTable) -> str:
    buf = io.StringIO()
    buf.write(f"#dim={table.dim}\n")
    writer = csv.writer(buf, lineterminator="\n")
    for label, group, vec in zip(table.labels, table.groups, table.vectors):
        writer.writerow([label, group] + [repr(float(v)) for v in vec])
    return buf.getvalue()


def write_features(table: FeatureTable, path) -> None:
    atomic_write_text(path, format_features(table))


def features_from_manifest(manifest, spec: EmbeddingSpec, workers: int = 1) -> FeatureTable:
    paths = [r.path for r in manifest.records]
    vectors = embed_paths(paths, spec, workers)
    return FeatureTable(paths, [r.group for r in manifest.records], vectors)
