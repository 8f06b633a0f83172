"""
DimLab - 多重分形盒维数实验室

CSV 导出模块 - 尺度序列、维数报告与验收检查结果
"""
import csv
import re
from pathlib import Path
from typing import Iterable, Optional, Sequence

from counting import ScaleSeries
from dims import DimReport
from logger import get_logger

logger = get_logger("export")

SERIES_COLUMNS = ["k", "r", "value", "log_value", "minus_log_r"]
REPORT_COLUMNS = ["quantity", "q", "value", "lower", "upper", "ols", "k_lo", "k_hi",
                  "mode", "variant", "series", "error", "note"]
CHECK_COLUMNS = ["check", "passed", "detail"]


def fmt(value) -> str:
    """浮点数写成最短可往返的 repr，None 写空串"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def _safe_name(text: str) -> str:
    return re.sub(r"[^0-9A-Za-z_.+-]", "_", text)


class CsvExporter:
    """CSV 导出器，所有文件写在 out_dir 下，行序与数值格式固定"""

    def __init__(self, out_dir):
        """
        初始化导出器

        Args:
            out_dir: 输出目录，不存在时创建
        """
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def _write(self, path: Path, columns: list, rows: Iterable[dict]) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        # newline="" 让 csv 模块自己控制换行，跨平台字节一致
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.DictWriter(f, fieldnames=columns, lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow(row)
        return path

    def write_series(self, series: ScaleSeries, name: str) -> Path:
        """
        写出一条尺度序列

        Args:
            series: 尺度序列
            name: 文件名（不含目录）

        Returns:
            写出的路径
        """
        rows = (dict(zip(SERIES_COLUMNS, (fmt(k), fmt(r), fmt(v), fmt(lv), fmt(mlr))))
                for k, r, v, lv, mlr in series.rows())
        return self._write(self.out_dir / "series" / name, SERIES_COLUMNS, rows)

    def write_report(self, reports: Sequence[DimReport], name: str = "report.csv") -> Path:
        """
        写出维数报告，每个 (量, q) 一行；有斜率来源的量同时写出其尺度序列

        Returns:
            报告文件路径
        """
        rows = []
        for report in reports:
            for quantity, entry in report.entries():
                estimate = entry.estimate
                series_file = ""
                if estimate is not None and estimate.series is not None:
                    series_file = f"{_safe_name(quantity)}_q={fmt(report.q)}.csv"
                    self.write_series(estimate.series, series_file)
                    series_file = f"series/{series_file}"
                rows.append({
                    "quantity": quantity,
                    "q": fmt(report.q),
                    "value": fmt(entry.value),
                    "lower": fmt(estimate.lower) if estimate else "",
                    "upper": fmt(estimate.upper) if estimate else "",
                    "ols": fmt(estimate.ols) if estimate else "",
                    "k_lo": fmt(estimate.window[0]) if estimate else "",
                    "k_hi": fmt(estimate.window[1]) if estimate else "",
                    "mode": report.mode,
                    "variant": report.variant,
                    "series": series_file,
                    "error": entry.error or "",
                    "note": entry.note,
                })
        path = self._write(self.out_dir / name, REPORT_COLUMNS, rows)
        logger.info(f"报告已写出: {path} ({len(rows)} 行)")
        return path

    def write_checks(self, results: Sequence, name: str = "checks.csv") -> Path:
        """写出验收检查结果，results 的元素需有 name / passed / detail 属性"""
        rows = ({"check": r.name, "passed": fmt(bool(r.passed)), "detail": r.detail} for r in results)
        return self._write(self.out_dir / name, CHECK_COLUMNS, rows)

    def write_witness(self, points, values, name: str = "witness.csv") -> Path:
        """写出 Fortet-Mourier 见证函数：每个支撑点的坐标与函数值"""
        points = [list(p) for p in points]
        dim = len(points[0]) if points else 1
        columns = [f"x{j}" for j in range(dim)] + ["f"]
        rows = ({**{f"x{j}": fmt(p[j]) for j in range(dim)}, "f": fmt(v)}
                for p, v in zip(points, values))
        return self._write(self.out_dir / name, columns, rows)

    def read_rows(self, name: str) -> list[dict]:
        """读回一个 CSV，用于比对与测试"""
        with open(self.out_dir / name, 'r', newline='', encoding='utf-8') as f:
            return list(csv.DictReader(f))


def export_report(out_dir, reports: Sequence[DimReport], name: Optional[str] = None) -> Path:
    """便捷函数：写出报告及其全部尺度序列"""
    return CsvExporter(out_dir).write_report(reports, name or "report.csv")
