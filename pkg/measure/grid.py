"""
DimLab - 多重分形盒维数实验室

网格离散化 - 包围盒、b 进网格单元与网格测度
"""
import math
from dataclasses import dataclass, field

import numpy as np

from config import config
from errors import OutOfBoxError, MeasureError

GRID_SNAP = config.get("counting", "radius_rtol", default=1e-9)


@dataclass(frozen=True)
class BoundingBox:
    """会话级轴对齐包围盒，所有网格层级都在它上面细分"""
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise MeasureError(f"包围盒维数不一致: {lo} / {hi}")
        if any(h <= l for l, h in zip(lo, hi)):
            raise MeasureError(f"包围盒为空: {lo} / {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def unit(cls, dim: int) -> "BoundingBox":
        return cls((0.0,) * dim, (1.0,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def widths(self) -> np.ndarray:
        return np.asarray(self.hi) - np.asarray(self.lo)

    def contains(self, points) -> np.ndarray:
        """逐点判断是否在闭包围盒内（带容差）"""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        tol = GRID_SNAP * self.widths
        return np.all((pts >= np.asarray(self.lo) - tol) & (pts <= np.asarray(self.hi) + tol), axis=1)


@dataclass(frozen=True, order=True)
class GridCell:
    """半开 b 进单元，坐标相对于包围盒"""
    base: int
    level: int
    index: tuple

    def __post_init__(self):
        if self.base < 2 or self.level < 0:
            raise MeasureError(f"网格参数无效: base={self.base}, level={self.level}")
        object.__setattr__(self, "index", tuple(int(i) for i in self.index))

    def bounds(self, frame: BoundingBox) -> tuple[np.ndarray, np.ndarray]:
        """返回单元在绝对坐标下的 (lo, hi)"""
        step = frame.widths / float(self.base) ** self.level
        lo = np.asarray(frame.lo) + np.asarray(self.index, dtype=float) * step
        return lo, lo + step

    def center(self, frame: BoundingBox) -> np.ndarray:
        lo, hi = self.bounds(frame)
        return (lo + hi) / 2.0

    def diameter(self, frame: BoundingBox) -> float:
        lo, hi = self.bounds(frame)
        return float(np.linalg.norm(hi - lo))

    def contains(self, points, frame: BoundingBox) -> np.ndarray:
        idx = cell_indices(points, self.base, self.level, frame)
        return np.all(idx == np.asarray(self.index), axis=1)


@dataclass(frozen=True)
class GridMeasure:
    """网格测度：只记录与支撑相交的单元"""
    base: int
    level: int
    cell_masses: dict = field(default_factory=dict)
    frame: BoundingBox = None

    @property
    def total(self) -> float:
        return math.fsum(self.cell_masses.values())

    def moment_sum(self, q: float) -> float:
        """Σ 单元质量^q"""
        return math.fsum(m ** q for m in self.cell_masses.values())


def cell_indices(points, base: int, level: int, frame: BoundingBox) -> np.ndarray:
    """
    计算点所在单元的整数下标（下闭上开，带吸附容差）

    Raises:
        OutOfBoxError: 有点落在包围盒之外
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    inside = frame.contains(pts)
    if not np.all(inside):
        bad = pts[~inside][:5].tolist()
        raise OutOfBoxError(f"{int((~inside).sum())} 个原子落在包围盒 {frame.lo}-{frame.hi} 之外，例如 {bad}")
    n_cells = base ** level
    scaled = (pts - np.asarray(frame.lo)) / frame.widths * n_cells
    idx = np.floor(scaled + GRID_SNAP).astype(np.int64)
    # 恰好落在上边界的点归入最后一个单元
    return np.clip(idx, 0, n_cells - 1)


def to_grid(measure, base: int, level: int, frame: BoundingBox = None) -> GridMeasure:
    """
    把测度的每个原子权重分配到所在网格单元

    Args:
        measure: DiscreteMeasure
        base: 网格进制 b ≥ 2
        level: 细分层级 ℓ ≥ 0
        frame: 包围盒，默认单位盒

    Returns:
        GridMeasure，单元按下标排序
    """
    if base < 2 or level < 0:
        raise MeasureError(f"网格参数无效: base={base}, level={level}")
    frame = frame or BoundingBox.unit(measure.dim)
    idx = cell_indices(measure.atoms, base, level, frame)
    cells, inverse = np.unique(idx, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    order = np.argsort(inverse, kind="stable")
    bounds = np.searchsorted(inverse[order], np.arange(len(cells) + 1))
    masses = {}
    for c, row in enumerate(cells):
        members = order[bounds[c]:bounds[c + 1]]
        masses[GridCell(base, level, tuple(row))] = math.fsum(measure.weights[members])
    return GridMeasure(base=base, level=level, cell_masses=masses, frame=frame)
