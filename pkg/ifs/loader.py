"""
DimLab - 多重分形盒维数实验室

IFS 配置文件读取

JSON 结构：
    {
        "dim": 1,
        "maps": [
            {"ratio": 0.333, "orthogonal": [[1.0]], "translation": [0.0], "prob": 0.5},
            ...
        ],
        "osc_box": {"lo": [0.0], "hi": [1.0]}
    }
orthogonal 省略时取单位阵（按行展开的 d·d 列表也可）。
"""
import json
import math
from pathlib import Path
from typing import Optional

from errors import ConfigError
from logger import get_logger
from measure import BoundingBox
from .model import IFSModel, Similarity

logger = get_logger("ifs")

PROB_TOL = 1e-6


def _number(entry, key: str, index: int) -> float:
    try:
        return float(entry[key])
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"第 {index} 个映射缺少或无法解析 {key}") from e


def parse_ifs(data: dict) -> IFSModel:
    """从字典构造 IFSModel"""
    try:
        dim = int(data["dim"])
        entries = data["maps"]
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"IFS 配置缺少 dim/maps: {e}") from e

    probs = [_number(entry, "prob", i) for i, entry in enumerate(entries, 1)]
    total = math.fsum(probs)
    if abs(total - 1.0) > PROB_TOL:
        raise ConfigError(f"IFS 概率和为 {total}，偏离 1 超过 {PROB_TOL}")
    probs = [p / total for p in probs] if total != 1.0 else probs

    maps = []
    for i, entry in enumerate(entries, 1):
        translation = entry.get("translation", [0.0] * dim)
        if len(translation) != dim:
            raise ConfigError(f"第 {i} 个映射的平移维数应为 {dim}")
        orthogonal = entry.get("orthogonal")
        if orthogonal is not None:
            flat = [float(v) for row in orthogonal for v in (row if isinstance(row, list) else [row])]
            if len(flat) != dim * dim:
                raise ConfigError(f"第 {i} 个映射的正交部分应有 {dim * dim} 个元素")
            orthogonal = [flat[r * dim:(r + 1) * dim] for r in range(dim)]
        maps.append(Similarity(ratio=_number(entry, "ratio", i), orthogonal=orthogonal,
                               translation=translation))
    return IFSModel(maps=tuple(maps), probs=tuple(probs))


def parse_box(data: Optional[dict]) -> Optional[BoundingBox]:
    if not data:
        return None
    return BoundingBox(tuple(data["lo"]), tuple(data["hi"]))


def load_ifs(path) -> tuple[IFSModel, Optional[BoundingBox]]:
    """
    读取 IFS 配置文件

    Returns:
        (IFSModel, 配置中声明的 OSC 开盒或 None)
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"IFS 配置不存在: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"IFS 配置解析失败 {path}: {e}") from e
    model = parse_ifs(data)
    logger.debug(f"读取 IFS: {path.name}, M={model.size}, d={model.dim}")
    return model, parse_box(data.get("osc_box"))
