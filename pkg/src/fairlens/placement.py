"""Where to put the salient patch: the eight cells around the salient box,
region selection strategies, bilinear resizing and pasting."""
from __future__ import annotations

import enum
from typing import NamedTuple, Optional

import numpy as np

from fairlens.errors import EmptyInputError, GeometryError
from fairlens.saliency import Rect

CELL_NAMES = (
    "top-left", "top", "top-right",
    "left", "right",
    "bottom-left", "bottom", "bottom-right",
)


class Placement(str, enum.Enum):
    MIN_AREA = "min"
    MAX_AREA = "max"
    RANDOM_AREA = "random"


class RegionPartition(NamedTuple):
    """The eight cells surrounding a box, in ``CELL_NAMES`` order."""

    cells: tuple

    def areas(self) -> list:
        return [c.area for c in self.cells]


def _check_inside(width: int, height: int, rect: Rect) -> None:
    x0, y0, x1, y1 = rect
    if not (0 <= x0 <= x1 <= width and 0 <= y0 <= y1 <= height):
        raise GeometryError(f"rect {tuple(rect)} is not inside a {width}x{height} image")


def partition_regions(image_w: int, image_h: int, box: Rect) -> RegionPartition:
    """Cut the image along the box edges into a 3x3 grid and drop the center."""
    _check_inside(image_w, image_h, box)
    if box.area == 0:
        raise GeometryError("salient box has zero area")
    xs = (0, box.x0, box.x1, image_w)
    ys = (0, box.y0, box.y1, image_h)
    cells = []
    for row in range(3):
        for col in range(3):
            if row == 1 and col == 1:
                continue
            cells.append(Rect(xs[col], ys[row], xs[col + 1], ys[row + 1]))
    return RegionPartition(tuple(cells))


def choose_region(partition: RegionPartition, strategy: Placement,
                  rng: np.random.Generator) -> Optional[Rect]:
    """Pick a cell with positive area, or None when every cell is empty.

    Min/max ties resolve to the lowest cell index. ``rng`` is only consumed by
    the random strategy.
    """
    strategy = Placement(strategy)
    candidates = [(i, c) for i, c in enumerate(partition.cells) if c.area > 0]
    if not candidates:
        return None
    if strategy is Placement.MIN_AREA:
        return min(candidates, key=lambda ic: (ic[1].area, ic[0]))[1]
    if strategy is Placement.MAX_AREA:
        return max(candidates, key=lambda ic: (ic[1].area, -ic[0]))[1]
    return candidates[int(rng.integers(len(candidates)))][1]


def crop(image: np.ndarray, rect: Rect) -> np.ndarray:
    h, w = image.shape[:2]
    _check_inside(w, h, rect)
    ys, xs = rect.slices()
    return image[ys, xs].copy()


def _axis_weights(src: int, dst: int):
    # half-pixel centers, edge-clamped
    pos = (np.arange(dst) + 0.5) * (src / dst) - 0.5
    pos = np.clip(pos, 0.0, src - 1)
    lo = np.floor(pos).astype(np.intp)
    hi = np.minimum(lo + 1, src - 1)
    return lo, hi, pos - lo


def resize_crop(patch: np.ndarray, target_w: int, target_h: int) -> np.ndarray:
    """Bilinear resample of an ``H x W x C`` uint8 patch to ``target_h x target_w``."""
    if patch.ndim != 3 or patch.shape[0] == 0 or patch.shape[1] == 0:
        raise EmptyInputError(f"cannot resize an empty patch of shape {patch.shape}")
    if target_w < 1 or target_h < 1:
        raise GeometryError(f"target size must be positive, got {target_w}x{target_h}")
    src_h, src_w = patch.shape[:2]
    if (src_w, src_h) == (target_w, target_h):
        return patch.copy()

    y_lo, y_hi, fy = _axis_weights(src_h, target_h)
    x_lo, x_hi, fx = _axis_weights(src_w, target_w)
    p = patch.astype(np.float64)
    fx = fx[None, :, None]
    top = p[y_lo][:, x_lo] * (1 - fx) + p[y_lo][:, x_hi] * fx
    bottom = p[y_hi][:, x_lo] * (1 - fx) + p[y_hi][:, x_hi] * fx
    fy = fy[:, None, None]
    out = top * (1 - fy) + bottom * fy
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def paste(dst: np.ndarray, patch: np.ndarray, at: Rect) -> np.ndarray:
    """Copy of ``dst`` with ``patch`` written into ``at``."""
    h, w = dst.shape[:2]
    _check_inside(w, h, at)
    if patch.shape[:2] != (at.height, at.width) or patch.shape[2:] != dst.shape[2:]:
        raise GeometryError(
            f"patch of shape {patch.shape} does not fit rect {tuple(at)} of {dst.shape}")
    out = dst.copy()
    ys, xs = at.slices()
    out[ys, xs] = patch
    return out
