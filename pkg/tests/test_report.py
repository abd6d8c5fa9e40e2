import csv
import io
import json

import pytest

from fairlens.errors import ConfigError
from fairlens.report import (
    COLUMNS,
    MEAN_LABEL,
    AuditReport,
    ReportEntry,
    read_report,
    render_csv,
    write_report,
)


def entry(name, x):
    return ReportEntry(name, "f|m", D_within=x, D_inter=2 * x, M=x / 3, ISS_intra=x / 7)


def test_single_entry_has_no_mean_row():
    rows = list(csv.reader(io.StringIO(render_csv(AuditReport([entry("a", 0.1)])))))
    assert rows[0] == list(COLUMNS)
    assert len(rows) == 2
    assert rows[1][:2] == ["a", "f|m"]
    assert rows[1][COLUMNS.index("ISS_cross")] == ""


def test_mean_row():
    xs = [0.1, 0.25, 0.7, 1e-3, 0.33]
    report = AuditReport([entry(str(i), x) for i, x in enumerate(xs)])
    mean = report.mean_entry()
    assert mean.dataset == MEAN_LABEL
    assert mean.D_within == pytest.approx(sum(xs) / 5, abs=1e-12)
    assert mean.M == pytest.approx(sum(xs) / 15, abs=1e-12)
    assert mean.IIAS is None
    rows = list(csv.reader(io.StringIO(render_csv(report))))
    assert rows[-1][0] == MEAN_LABEL and len(rows) == 7


def test_json_round_trip_and_csv_agreement(tmp_path):
    report = AuditReport([entry("a", 0.123456789), entry("b", 0.5)])
    write_report(report, tmp_path / "r.json")
    write_report(report, tmp_path / "r.csv")
    back = read_report(tmp_path / "r.json")
    assert back.entries == report.entries
    doc = json.loads((tmp_path / "r.json").read_text())
    assert doc["mean"]["D_within"] == pytest.approx((0.123456789 + 0.5) / 2)
    rows = list(csv.DictReader(open(tmp_path / "r.csv")))
    for row, e in zip(rows, report.rows()):
        for col in ("D_within", "D_inter", "M", "ISS_intra"):
            assert float(row[col]) == pytest.approx(getattr(e, col), rel=1e-5)


def test_unknown_format(tmp_path):
    with pytest.raises(ConfigError):
        write_report(AuditReport([entry("a", 1)]), tmp_path / "r.txt")
