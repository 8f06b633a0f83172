"""
DimLab - 多重分形盒维数实验室

测度文本格式读写

格式：每行一个原子，先 d 个坐标再一个权重，空白分隔；'#' 开头为注释。
注释中 "# key: value" 形式的行作为来源信息头保存。
"""
import math
from pathlib import Path
from typing import Optional

import numpy as np

from errors import MeasureError
from logger import get_logger
from .core import DiscreteMeasure

logger = get_logger("measure")

# 权重和在此范围内才会被重新归一化
RENORMALIZE_TOL = 1e-6
EXACT_TOL = 1e-12


def save_measure(path, measure: DiscreteMeasure, header: Optional[dict] = None) -> Path:
    """
    写出测度文件

    Args:
        path: 输出路径
        measure: 测度
        header: 来源信息，写成注释头

    Returns:
        写出的路径
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["# DimLab discrete measure", f"# dim: {measure.dim}", f"# atoms: {measure.size}"]
    for key, value in (header or {}).items():
        lines.append(f"# {key}: {value}")
    for atom, weight in zip(measure.atoms, measure.weights):
        lines.append(" ".join(repr(float(c)) for c in atom) + " " + repr(float(weight)))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"已写出测度文件: {path} ({measure.size} 个原子)")
    return path


def read_header(path) -> dict:
    """读取注释头中的 key: value 信息"""
    header = {}
    with open(path, 'r', encoding='utf-8') as f:
        for line in f:
            line = line.strip()
            if line.startswith("#") and ":" in line:
                key, value = line[1:].split(":", 1)
                header[key.strip()] = value.strip()
    return header


def load_measure(path) -> DiscreteMeasure:
    """
    读取测度文件

    权重和偏离 1 不超过 1e-6 时重新归一化，否则拒绝。

    Raises:
        MeasureError: 格式错误或权重和不合法
    """
    path = Path(path)
    if not path.exists():
        raise MeasureError(f"测度文件不存在: {path}")

    rows = []
    with open(path, 'r', encoding='utf-8') as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                rows.append([float(tok) for tok in line.split()])
            except ValueError as e:
                raise MeasureError(f"{path}:{lineno} 无法解析: {e}") from e

    if not rows:
        raise MeasureError(f"测度文件为空: {path}")
    width = len(rows[0])
    if width < 2 or any(len(r) != width for r in rows):
        raise MeasureError(f"{path} 每行列数必须一致且至少为 2")

    data = np.asarray(rows, dtype=float)
    atoms, weights = data[:, :-1], data[:, -1]
    total = math.fsum(weights)
    if abs(total - 1.0) > RENORMALIZE_TOL:
        raise MeasureError(f"{path} 权重和为 {total}，无法归一化")
    if abs(total - 1.0) > EXACT_TOL:
        logger.warning(f"{path} 权重和为 {total}，已重新归一化")
        weights = weights / total
    return DiscreteMeasure(atoms=atoms, weights=weights)
