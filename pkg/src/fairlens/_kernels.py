"""Pure-Python (numpy/scipy) implementations of the hot kernels.

Used when the compiled ``fairlens._core`` extension is unavailable or disabled
through ``FAIRLENS_NO_EXT=1``. Signatures and results match the extension.
"""
import numpy as np
from scipy import ndimage
from scipy.spatial.distance import cdist, pdist

_EIGHT = np.ones((3, 3), dtype=bool)


def integral_image(gray):
    h, w = gray.shape
    ii = np.zeros((h + 1, w + 1), dtype=np.float64)
    ii[1:, 1:] = np.cumsum(np.cumsum(gray, axis=0, dtype=np.float64), axis=1)
    return ii


def center_surround(gray, ii, radii):
    h, w = gray.shape
    raw = np.zeros((h, w), dtype=np.float64)
    ys = np.arange(h)
    xs = np.arange(w)
    for r in radii:
        r = int(r)
        y0 = np.maximum(ys - r, 0)
        y1 = np.minimum(ys + r + 1, h)
        x0 = np.maximum(xs - r, 0)
        x1 = np.minimum(xs + r + 1, w)
        sums = (ii[np.ix_(y1, x1)] - ii[np.ix_(y0, x1)]
                - ii[np.ix_(y1, x0)] + ii[np.ix_(y0, x0)])
        counts = np.outer(y1 - y0, x1 - x0)
        raw += np.abs(gray - sums / counts)
    return raw


def label_components(mask):
    labels, n = ndimage.label(mask, structure=_EIGHT)
    return labels.astype(np.int32, copy=False), int(n)


def pairwise_within_sum(x):
    if x.shape[0] < 2:
        return 0.0
    return float(pdist(x).sum())


def pairwise_cross_sum(a, b):
    return float(cdist(a, b).sum())
