"""RandAugment-style operations on ``H x W x 3`` uint8 arrays.

Magnitudes are integers in ``[0, 30]`` mapped linearly into each op's range.
Magnitude 0 is the identity for every op. Geometric ops fill uncovered
pixels with mid-gray (128).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from PIL import Image, ImageEnhance, ImageOps

from fairlens.errors import ConfigError, EmptyInputError

MAX_MAGNITUDE = 30
FILL = (128, 128, 128)


class AugOp(str, enum.Enum):
    IDENTITY = "identity"
    AUTO_CONTRAST = "auto_contrast"
    EQUALIZE = "equalize"
    ROTATE = "rotate"
    SOLARIZE = "solarize"
    POSTERIZE = "posterize"
    BRIGHTNESS = "brightness"
    CONTRAST = "contrast"
    SHARPNESS = "sharpness"
    SHEAR_X = "shear_x"
    SHEAR_Y = "shear_y"
    TRANSLATE_X = "translate_x"
    TRANSLATE_Y = "translate_y"


ALL_OPS = tuple(AugOp)

_SIGNED = frozenset({
    AugOp.ROTATE, AugOp.SHEAR_X, AugOp.SHEAR_Y, AugOp.TRANSLATE_X, AugOp.TRANSLATE_Y,
    AugOp.BRIGHTNESS, AugOp.CONTRAST, AugOp.SHARPNESS,
})


@dataclass(frozen=True)
class RandAugPolicy:
    n_ops: int = 2
    magnitude: int = 15

    def __post_init__(self):
        if self.n_ops < 0:
            raise ConfigError(f"n_ops must be >= 0, got {self.n_ops}")
        if not 0 <= self.magnitude <= MAX_MAGNITUDE:
            raise ConfigError(f"magnitude must lie in [0, {MAX_MAGNITUDE}], got {self.magnitude}")


def _blend(image, target, t):
    out = image.astype(np.float64) + (target.astype(np.float64) - image) * t
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def _affine(pil, coeffs, resample=Image.Resampling.NEAREST):
    return np.array(pil.transform(pil.size, Image.Transform.AFFINE, coeffs, resample, fillcolor=FILL))


def apply_op(image: np.ndarray, op: AugOp, magnitude: int,
             rng: np.random.Generator) -> np.ndarray:
    """Apply one op; returns a new array of the same shape."""
    image = np.asarray(image, dtype=np.uint8)
    if image.ndim != 3 or image.shape[0] == 0 or image.shape[1] == 0:
        raise EmptyInputError(f"cannot augment an image of shape {image.shape}")
    if not 0 <= magnitude <= MAX_MAGNITUDE:
        raise ConfigError(f"magnitude must lie in [0, {MAX_MAGNITUDE}], got {magnitude}")
    op = AugOp(op)
    # sign is drawn regardless of magnitude so rng consumption depends only on op
    sign = (1.0 if rng.random() < 0.5 else -1.0) if op in _SIGNED else 1.0
    if op is AugOp.IDENTITY or magnitude == 0:
        return image.copy()

    level = magnitude / MAX_MAGNITUDE
    h, w = image.shape[:2]
    pil = Image.fromarray(image)

    if op is AugOp.AUTO_CONTRAST:
        return _blend(image, np.asarray(ImageOps.autocontrast(pil)), level)
    if op is AugOp.EQUALIZE:
        return _blend(image, np.asarray(ImageOps.equalize(pil)), level)
    if op is AugOp.SOLARIZE:
        threshold = round(256 * (1 - level))
        return np.where(image >= threshold, 255 - image, image).astype(np.uint8)
    if op is AugOp.POSTERIZE:
        bits = 8 - round(4 * level)
        mask = np.uint8((0xFF << (8 - bits)) & 0xFF)
        return image & mask
    if op in (AugOp.BRIGHTNESS, AugOp.CONTRAST, AugOp.SHARPNESS):
        factor = 1.0 + sign * 0.9 * level
        enhancer = {
            AugOp.BRIGHTNESS: ImageEnhance.Brightness,
            AugOp.CONTRAST: ImageEnhance.Contrast,
            AugOp.SHARPNESS: ImageEnhance.Sharpness,
        }[op]
        return np.array(enhancer(pil).enhance(factor))
    if op is AugOp.ROTATE:
        return np.array(pil.rotate(sign * 30.0 * level, resample=Image.Resampling.BILINEAR, fillcolor=FILL))
    if op is AugOp.SHEAR_X:
        return _affine(pil, (1, sign * 0.3 * level, 0, 0, 1, 0))
    if op is AugOp.SHEAR_Y:
        return _affine(pil, (1, 0, 0, sign * 0.3 * level, 1, 0))
    if op is AugOp.TRANSLATE_X:
        return _affine(pil, (1, 0, sign * 0.3 * level * w, 0, 1, 0))
    if op is AugOp.TRANSLATE_Y:
        return _affine(pil, (1, 0, 0, 0, 1, sign * 0.3 * level * h))
    raise AssertionError(op)


def rand_augment(image: np.ndarray, policy: RandAugPolicy,
                 rng: np.random.Generator) -> np.ndarray:
    """Apply ``policy.n_ops`` ops drawn uniformly with replacement from ``ALL_OPS``."""
    out = np.asarray(image, dtype=np.uint8).copy()
    for _ in range(policy.n_ops):
        op = ALL_OPS[int(rng.integers(len(ALL_OPS)))]
        out = apply_op(out, op, policy.magnitude, rng)
    return out
