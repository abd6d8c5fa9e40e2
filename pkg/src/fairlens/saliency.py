"""Fine-grained static saliency and salient-box extraction.

Saliency is a multi-scale center-surround contrast computed on a luminance
image: for every pixel and every radius the mean of the (clipped) square
window around it is compared with the pixel itself, on- and off-center
responses are summed over scales, and the result is min-max normalized.
Window means come from an integral image so each pixel costs O(1) per scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from fairlens._backend import kernels
from fairlens.errors import ConfigError, EmptyInputError

DEFAULT_RADII = (1, 2, 4, 8, 16)
DEFAULT_THRESHOLD_FRACTION = 0.5

_LUMA = np.array([0.299, 0.587, 0.114])


class Rect(NamedTuple):
    """Pixel rectangle, ``x0``/``y0`` inclusive and ``x1``/``y1`` exclusive."""

    x0: int
    y0: int
    x1: int
    y1: int

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    @property
    def area(self) -> int:
        return max(self.width, 0) * max(self.height, 0)

    def slices(self):
        return slice(self.y0, self.y1), slice(self.x0, self.x1)


@dataclass(frozen=True)
class SalientBox:
    rect: Rect
    peak_score: float

    def to_dict(self) -> dict:
        x0, y0, x1, y1 = self.rect
        return {"x0": x0, "y0": y0, "x1": x1, "y1": y1, "peak": self.peak_score}


@dataclass(frozen=True)
class SaliencyConfig:
    radii: Optional[tuple] = None
    threshold_fraction: float = DEFAULT_THRESHOLD_FRACTION

    def __post_init__(self):
        if self.radii is not None:
            if len(self.radii) == 0:
                raise ConfigError("radii must not be empty")
            if any(int(r) < 1 for r in self.radii):
                raise ConfigError(f"radii must be >= 1, got {self.radii}")
        if not 0.0 <= self.threshold_fraction <= 1.0:
            raise ConfigError(
                f"threshold_fraction must lie in [0, 1], got {self.threshold_fraction}")


def to_grayscale(image: np.ndarray) -> np.ndarray:
    """BT.601 luminance of an ``H x W x 3`` uint8 image, scaled to [0, 1]."""
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError(f"expected an H x W x 3 image, got shape {image.shape}")
    if image.shape[0] == 0 or image.shape[1] == 0:
        raise EmptyInputError("image has a zero dimension")
    gray = image.astype(np.float64) @ _LUMA / 255.0
    return np.clip(gray, 0.0, 1.0)


def integral_image(gray: np.ndarray) -> np.ndarray:
    """Summed-area table with a leading zero row and column.

    ``ii[y, x]`` is the sum of ``gray[:y, :x]``, so the sum over a rectangle is
    ``ii[y1, x1] - ii[y0, x1] - ii[y1, x0] + ii[y0, x0]``.
    """
    gray = np.ascontiguousarray(gray, dtype=np.float64)
    if gray.ndim != 2 or gray.size == 0:
        raise EmptyInputError("gray image is empty")
    return kernels.integral_image(gray)


def window_sum(ii: np.ndarray, rect: Rect) -> float:
    x0, y0, x1, y1 = rect
    return float(ii[y1, x1] - ii[y0, x1] - ii[y1, x0] + ii[y0, x0])


def effective_radii(radii: Optional[Sequence[int]], width: int, height: int) -> tuple:
    """Clamp radii to ``min(W, H) // 2`` (at least 1), deduplicated and sorted."""
    if radii is None:
        radii = DEFAULT_RADII
    if len(radii) == 0:
        raise ConfigError("radii must not be empty")
    limit = max(1, min(width, height) // 2)
    out = set()
    for r in radii:
        r = int(r)
        if r < 1:
            raise ConfigError(f"radius must be >= 1, got {r}")
        out.add(min(r, limit))
    return tuple(sorted(out))


def center_surround_raw(gray: np.ndarray, radii: Optional[Sequence[int]] = None) -> np.ndarray:
    """Unnormalized multi-scale center-surround contrast."""
    gray = np.ascontiguousarray(gray, dtype=np.float64)
    if gray.ndim != 2 or gray.size == 0:
        raise EmptyInputError("gray image is empty")
    h, w = gray.shape
    rs = np.asarray(effective_radii(radii, w, h), dtype=np.intp)
    ii = kernels.integral_image(gray)
    return kernels.center_surround(gray, ii, rs)


def fine_grained_saliency(gray: np.ndarray, radii: Optional[Sequence[int]] = None) -> np.ndarray:
    """Saliency map in [0, 1]; identically zero for a constant image."""
    gray = np.ascontiguousarray(gray, dtype=np.float64)
    if gray.ndim != 2 or gray.size == 0:
        raise EmptyInputError("gray image is empty")
    if radii is not None and len(radii) == 0:
        raise ConfigError("radii must not be empty")
    # Integral-image rounding would otherwise leave ~1e-16 noise to normalize.
    if gray.max() == gray.min():
        return np.zeros_like(gray)
    raw = center_surround_raw(gray, radii)
    lo, hi = raw.min(), raw.max()
    if hi <= lo:
        return np.zeros_like(raw)
    return (raw - lo) / (hi - lo)


def _fallback_box(width: int, height: int) -> Rect:
    bw, bh = math.ceil(width / 2), math.ceil(height / 2)
    x0, y0 = (width - bw) // 2, (height - bh) // 2
    return Rect(x0, y0, x0 + bw, y0 + bh)


def extract_salient_box(smap: np.ndarray,
                        threshold_fraction: float = DEFAULT_THRESHOLD_FRACTION) -> SalientBox:
    """Bounding box of the largest 8-connected component at or above
    ``threshold_fraction * max(smap)``.

    Ties in component area go to the component whose first pixel comes first
    in raster order. An all-zero map yields the centered half-size box.
    """
    smap = np.asarray(smap, dtype=np.float64)
    if smap.ndim != 2 or smap.size == 0:
        raise EmptyInputError("saliency map is empty")
    if not 0.0 <= threshold_fraction <= 1.0:
        raise ConfigError(f"threshold_fraction must lie in [0, 1], got {threshold_fraction}")
    h, w = smap.shape
    peak = float(smap.max())
    if peak <= 0.0:
        return SalientBox(_fallback_box(w, h), 0.0)

    mask = np.ascontiguousarray(smap >= threshold_fraction * peak, dtype=np.uint8)
    labels, n = kernels.label_components(mask)
    flat = labels.ravel()
    areas = np.bincount(flat, minlength=n + 1)
    areas[0] = 0
    ids, first = np.unique(flat, return_index=True)
    first_pixel = np.full(n + 1, flat.size, dtype=np.int64)
    first_pixel[ids] = first
    # lexsort: last key is primary -> largest area, then earliest first pixel
    order = np.lexsort((first_pixel[1:], -areas[1:]))
    best = int(order[0]) + 1

    ys, xs = np.nonzero(labels == best)
    rect = Rect(int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)
    return SalientBox(rect, float(smap[labels == best].max()))


def detect_salient_box(image: np.ndarray, config: Optional[SaliencyConfig] = None) -> SalientBox:
    """Grayscale, saliency and box extraction in one call."""
    config = config or SaliencyConfig()
    smap = fine_grained_saliency(to_grayscale(image), config.radii)
    return extract_salient_box(smap, config.threshold_fraction)
