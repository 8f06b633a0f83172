"""
CSV 导出测试
"""
import pytest

from counting import ScaleSeries, slope_bounds
from dims import DimReport, ReportEntry
from experiments import CheckResult
from export import CsvExporter, export_report, fmt


def test_fmt():
    assert fmt(None) == ""
    assert fmt(True) == "1"
    assert fmt(False) == "0"
    assert fmt(3) == "3"
    assert fmt(0.1) == "0.1"
    assert fmt(2.0) == "2.0"
    assert float(fmt(1 / 3)) == 1 / 3


def _report() -> DimReport:
    series = ScaleSeries.sample(3, 3, 6, lambda r: r ** -0.5, label="tau")
    estimate = slope_bounds(series)
    report = DimReport(q=0.0)
    report.set("tau", ReportEntry(value=estimate.upper, estimate=estimate))
    report.set("D_minus", ReportEntry(error="EmptyNetError: 网为空"))
    report.set("big_upper@eps=0.05", ReportEntry(value=0.4, note="cells=2"))
    return report


def test_write_report(tmp_path):
    path = export_report(tmp_path, [_report()])
    assert path == tmp_path / "report.csv"
    rows = CsvExporter(tmp_path).read_rows("report.csv")
    assert [r["quantity"] for r in rows] == ["tau", "D_minus", "big_upper@eps=0.05"]

    tau_row = rows[0]
    assert float(tau_row["value"]) == pytest.approx(0.5)
    assert tau_row["k_lo"] == "3"
    assert tau_row["k_hi"] == "6"
    assert tau_row["mode"] == "covering"
    assert tau_row["series"] == "series/tau_q=0.0.csv"
    assert rows[1]["value"] == ""
    assert rows[1]["error"].startswith("EmptyNetError")
    assert rows[2]["series"] == ""

    series_rows = CsvExporter(tmp_path).read_rows("series/tau_q=0.0.csv")
    assert [r["k"] for r in series_rows] == ["3", "4", "5", "6"]
    assert list(series_rows[0]) == ["k", "r", "value", "log_value", "minus_log_r"]


def test_report_is_byte_stable(tmp_path):
    first = export_report(tmp_path / "a", [_report()])
    second = export_report(tmp_path / "b", [_report()])
    assert first.read_bytes() == second.read_bytes()
    assert b"\r\n" not in first.read_bytes()


def test_write_checks_and_witness(tmp_path):
    exporter = CsvExporter(tmp_path)
    exporter.write_checks([CheckResult("guard", True, "ok"), CheckResult("tau_shape", False, "bad")])
    rows = exporter.read_rows("checks.csv")
    assert [(r["check"], r["passed"]) for r in rows] == [("guard", "1"), ("tau_shape", "0")]

    exporter.write_witness([[0.0, 1.0], [0.5, 0.5]], [1.0, -0.25], "w.csv")
    rows = exporter.read_rows("w.csv")
    assert list(rows[0]) == ["x0", "x1", "f"]
    assert rows[1]["f"] == "-0.25"
