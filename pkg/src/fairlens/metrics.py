"""Diversity and fairness metrics over unit-normalized feature vectors.

Every function normalizes its inputs to unit length on entry, so all metrics
are invariant to positive rescaling of the raw features.

* ``d_within``: within-group spread, sum of Euclidean distances over unordered
  pairs divided by ``N_i (N_i - 1)``. With unit vectors this lies in [0, 1].
* ``d_inter``: mean Euclidean distance over all cross-group pairs.
* ``fairness_diversity``: group-size weighted combination of both, bounded
  by ``alpha + beta``.
* ``iss_intra`` / ``iss_cross``: one minus mean pairwise cosine similarity,
  in [0, 2].
* ``iias``: mean over concepts of (mean cosine to male attributes minus mean
  cosine to female attributes); positive means closer to the male set.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from fairlens._backend import kernels
from fairlens.embedding import normalize_rows
from fairlens.errors import ConfigError, EmptyInputError

_CHUNK = 1 << 22

ArrayLike = Union[np.ndarray, Sequence[Sequence[float]]]


@dataclass(frozen=True)
class Weights:
    """Term weights; each must lie in [0, 0.5].

    The upper bound 0.5 is accepted with a warning: the combined metric is then
    bounded by 1 inclusively rather than strictly.
    """

    alpha: float = 0.5
    beta: float = 0.5

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not 0.0 <= v <= 0.5:
                raise ConfigError(f"{name} must lie in [0, 0.5], got {v}")
        if self.alpha == 0.5 or self.beta == 0.5:
            warnings.warn(
                "alpha or beta equals 0.5: the fairness-diversity bound is <= 1, not < 1",
                stacklevel=3,
            )


@dataclass
class Group:
    label: str
    vectors: np.ndarray

    def __post_init__(self):
        self.vectors = _unit(self.vectors, self.label)

    @property
    def size(self) -> int:
        return self.vectors.shape[0]


def _unit(vectors: ArrayLike, what="group") -> np.ndarray:
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[0] == 0:
        raise EmptyInputError(f"{what} has no vectors")
    return np.ascontiguousarray(normalize_rows(x))


def _as_group(g) -> Group:
    return g if isinstance(g, Group) else Group("", g)


def d_within(group) -> float:
    g = _as_group(group)
    n = g.size
    if n == 1:
        return 0.0
    return kernels.pairwise_within_sum(g.vectors) / (n * (n - 1))


def d_inter(a, b) -> float:
    a, b = _as_group(a), _as_group(b)
    if a.vectors.shape[1] != b.vectors.shape[1]:
        raise ConfigError(
            f"dimension mismatch: {a.vectors.shape[1]} vs {b.vectors.shape[1]}")
    return kernels.pairwise_cross_sum(a.vectors, b.vectors) / (a.size * b.size)


def as_groups(grouped: Union[Mapping[str, ArrayLike], Sequence[Group]]) -> list:
    if isinstance(grouped, Mapping):
        groups = [Group(str(k), v) for k, v in grouped.items()]
    else:
        groups = [_as_group(g) for g in grouped]
    if not groups:
        raise EmptyInputError("at least one group is required")
    dims = {g.vectors.shape[1] for g in groups}
    if len(dims) != 1:
        raise ConfigError(f"groups have inconsistent dimensions {sorted(dims)}")
    return groups


@dataclass(frozen=True)
class FairnessDiversity:
    """Combined score plus the dataset-level summaries that feed it.

    ``within`` is the size-weighted mean of per-group ``d_within``; ``inter``
    is the ``N_i N_j``-weighted mean of pairwise ``d_inter``, None for a
    single group; ``inter_term`` is the normalized cross-group sum that
    ``beta`` multiplies.
    """

    value: float
    within: float
    inter: Optional[float]
    inter_term: float
    per_group: dict


def fairness_diversity_terms(grouped, weights: Optional[Weights] = None) -> FairnessDiversity:
    if weights is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            weights = Weights()
    groups = as_groups(grouped)
    sizes = [g.size for g in groups]
    total = sum(sizes)
    spreads = [d_within(g) for g in groups]
    within = sum(n * d for n, d in zip(sizes, spreads)) / total

    pair_sum = 0.0
    pair_weight = 0
    for (i, gi), (j, gj) in combinations(enumerate(groups), 2):
        w = sizes[i] * sizes[j]
        pair_sum += w * d_inter(gi, gj)
        pair_weight += w
    inter_term = pair_sum / (total * (total - 1)) if total > 1 else 0.0

    return FairnessDiversity(
        value=weights.alpha * within + weights.beta * inter_term,
        within=within,
        inter=pair_sum / pair_weight if pair_weight else None,
        inter_term=inter_term,
        per_group={g.label: d for g, d in zip(groups, spreads)},
    )


def fairness_diversity(grouped, weights: Optional[Weights] = None) -> float:
    """Combined fairness-diversity score, in ``[0, alpha + beta]``."""
    return fairness_diversity_terms(grouped, weights).value


def _one_minus_cos(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # 1 - cos(a, b) as |a - b|^2 / (|a|^2 + |b|^2), which agrees for unit rows
    # but stays exactly 0 for identical vectors and exactly 2 for antipodes even
    # when normalization leaves |a| a few ulps away from 1.
    na = np.einsum("ij,ij->i", a, a)
    nb = np.einsum("ij,ij->i", b, b)
    out = np.empty((a.shape[0], b.shape[0]))
    step = max(1, _CHUNK // max(1, b.size))
    for start in range(0, a.shape[0], step):
        diff = a[start:start + step, None, :] - b[None, :, :]
        sq = np.einsum("ijk,ijk->ij", diff, diff)
        out[start:start + step] = sq / (na[start:start + step, None] + nb[None, :])
    return out


def iss_intra(vectors: ArrayLike) -> float:
    x = _unit(vectors, "dataset")
    n = x.shape[0]
    if n < 2:
        raise EmptyInputError("ISS intra needs at least two vectors")
    iu = np.triu_indices(n, k=1)
    return float(np.clip(_one_minus_cos(x, x)[iu].mean(), 0.0, 2.0))


def iss_cross(a: ArrayLike, b: ArrayLike) -> float:
    a, b = _unit(a, "first dataset"), _unit(b, "second dataset")
    if a.shape[1] != b.shape[1]:
        raise ConfigError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    return float(np.clip(_one_minus_cos(a, b).mean(), 0.0, 2.0))


def iias(concepts: ArrayLike, male_attrs: ArrayLike, female_attrs: ArrayLike) -> float:
    c = _unit(concepts, "concept set")
    m = _unit(male_attrs, "male attribute set")
    f = _unit(female_attrs, "female attribute set")
    if not c.shape[1] == m.shape[1] == f.shape[1]:
        raise ConfigError("concept and attribute vectors have different dimensions")
    male = (c @ m.T).mean(axis=1)
    female = (c @ f.T).mean(axis=1)
    return float((male - female).mean())
