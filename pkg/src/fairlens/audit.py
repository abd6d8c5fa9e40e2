"""End-to-end dataset audit: scan, optionally balance, embed, score."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from fairlens.dataset_io import Manifest, load_manifest, undersample_balance
from fairlens.embedding import EmbeddingSpec, FeatureTable, features_from_manifest
from fairlens.metrics import Weights, fairness_diversity_terms, iss_cross, iss_intra
from fairlens.report import AuditReport, ReportEntry

log = logging.getLogger(__name__)


def score_table(name: str, table: FeatureTable, weights: Weights,
                others: Optional[np.ndarray] = None) -> ReportEntry:
    """One report row for a grouped feature table.

    ``others`` holds the vectors of the remaining datasets; when given, the
    row also carries ISS cross against them.
    """
    groups = table.by_group()
    fd = fairness_diversity_terms(groups, weights)
    return ReportEntry(
        dataset=name,
        group_set="|".join(groups),
        D_within=fd.within,
        D_inter=fd.inter,
        M=fd.value,
        ISS_intra=iss_intra(table.vectors) if len(table) >= 2 else None,
        ISS_cross=iss_cross(table.vectors, others) if others is not None and len(others) else None,
    )


def audit_manifests(manifests: Sequence[Manifest], spec: EmbeddingSpec, weights: Weights,
                    balance_seed: Optional[int] = None, workers: int = 1) -> AuditReport:
    tables = []
    for m in manifests:
        if balance_seed is not None:
            before = m.group_sizes()
            m = undersample_balance(m, balance_seed)
            log.info("%s: balanced %s -> %s", m.name, before, m.group_sizes())
        tables.append((m.name, features_from_manifest(m, spec, workers)))

    report = AuditReport()
    for i, (name, table) in enumerate(tables):
        rest = [t.vectors for j, (_, t) in enumerate(tables) if j != i]
        others = np.vstack(rest) if rest else None
        report.add(score_table(name, table, weights, others))
    return report


def audit_paths(sources: Sequence, spec: EmbeddingSpec, weights: Weights,
                balance_seed: Optional[int] = None, workers: int = 1) -> AuditReport:
    manifests = [load_manifest(Path(s)) for s in sources]
    return audit_manifests(manifests, spec, weights, balance_seed, workers)
