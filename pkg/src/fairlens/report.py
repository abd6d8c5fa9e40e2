"""Audit reports rendered as CSV or JSON.

CSV values carry 6 significant digits; JSON keeps full precision. When a
report has more than one entry a final mean row is appended.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

from fairlens.errors import ConfigError, DataError
from fairlens.io import atomic_write_text

METRIC_COLUMNS = ("D_within", "D_inter", "M", "ISS_intra", "ISS_cross", "IIAS")
COLUMNS = ("dataset", "group_set") + METRIC_COLUMNS
MEAN_LABEL = "Mean Value"


@dataclass
class ReportEntry:
    dataset: str
    group_set: str = ""
    D_within: Optional[float] = None
    D_inter: Optional[float] = None
    M: Optional[float] = None
    ISS_intra: Optional[float] = None
    ISS_cross: Optional[float] = None
    IIAS: Optional[float] = None


@dataclass
class AuditReport:
    entries: list = field(default_factory=list)

    def add(self, entry: ReportEntry) -> None:
        self.entries.append(entry)

    def mean_entry(self) -> Optional[ReportEntry]:
        """Column-wise arithmetic mean over entries with a value; None for <2 entries."""
        if len(self.entries) < 2:
            return None
        means = {}
        for col in METRIC_COLUMNS:
            vals = [getattr(e, col) for e in self.entries if getattr(e, col) is not None]
            means[col] = math.fsum(vals) / len(vals) if vals else None
        return ReportEntry(MEAN_LABEL, "", **means)

    def rows(self) -> list:
        rows = list(self.entries)
        mean = self.mean_entry()
        if mean is not None:
            rows.append(mean)
        return rows


def _fmt(v) -> str:
    return "" if v is None else f"{v:.6g}"


def render_csv(report: AuditReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for e in report.rows():
        writer.writerow([e.dataset, e.group_set] + [_fmt(getattr(e, c)) for c in METRIC_COLUMNS])
    return buf.getvalue()


def render_json(report: AuditReport) -> str:
    mean = report.mean_entry()
    doc = {
        "columns": list(COLUMNS),
        "entries": [asdict(e) for e in report.entries],
        "mean": asdict(mean) if mean is not None else None,
    }
    return json.dumps(doc, indent=2) + "\n"


def write_report(report: AuditReport, path, format: Optional[str] = None) -> None:
    """Write ``report``; format is ``csv`` or ``json``, inferred from the suffix."""
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    if fmt == "csv":
        text = render_csv(report)
    elif fmt == "json":
        text = render_json(report)
    else:
        raise ConfigError(f"unknown report format {fmt!r}; use csv or json")
    try:
        atomic_write_text(path, text)
    except OSError as exc:
        raise DataError(f"cannot write report {path}: {exc}") from exc


def read_report(path) -> AuditReport:
    """Parse a JSON report back into entries (the mean row is recomputed, not read)."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read report {path}: {exc}") from exc
    names = {f.name for f in fields(ReportEntry)}
    return AuditReport([ReportEntry(**{k: v for k, v in e.items() if k in names})
                        for e in doc["entries"]])
