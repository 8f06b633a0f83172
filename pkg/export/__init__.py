"""
导出模块
提供尺度序列、维数报告与检查结果的 CSV 导出
"""
from .csv_exporter import CsvExporter, export_report, fmt

__all__ = [
    'CsvExporter',
    'export_report',
    'fmt',
]
