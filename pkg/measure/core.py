"""
DimLab - 多重分形盒维数实验室

测度核心 - 离散测度、区域、球质量与扩张
"""
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.spatial import cKDTree

from config import config
from errors import MeasureError
from logger import get_logger
from .grid import BoundingBox, GridCell

logger = get_logger("measure")

# 开球容差：‖a - x‖ < r·(1 - RADIUS_RTOL) 才算在球内
RADIUS_RTOL = config.get("counting", "radius_rtol", default=1e-9)
WEIGHT_TOL = 1e-9
POINT_TOL = 1e-12

Point = tuple


def open_radius(r: float) -> float:
    """把开球半径换算成闭查询半径；r=0 表示单点"""
    return r * (1.0 - RADIUS_RTOL) if r > 0 else POINT_TOL


def as_points(points, dim: Optional[int] = None) -> np.ndarray:
    """转换为 (n, d) 浮点数组"""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1) if dim is None or arr.shape[0] == dim else arr.reshape(-1, 1)
    return arr


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """有限个带权原子构成的概率测度"""
    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms = np.array(self.atoms, dtype=float)
        if atoms.ndim == 1:
            atoms = atoms.reshape(-1, 1)
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if atoms.shape[0] == 0:
            raise MeasureError("测度没有原子")
        if atoms.shape[0] != weights.shape[0]:
            raise MeasureError(f"原子数 {atoms.shape[0]} 与权重数 {weights.shape[0]} 不一致")
        if not np.all(np.isfinite(atoms)):
            raise MeasureError("原子坐标含非有限值")
        if not np.all(weights > 0):
            raise MeasureError("权重必须全部为正")
        total = math.fsum(weights)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise MeasureError(f"权重和为 {total}，偏离 1 超过 {WEIGHT_TOL}")
        atoms.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    @property
    def size(self) -> int:
        return self.atoms.shape[0]

    @cached_property
    def index(self) -> "MassIndex":
        """懒加载的 KD 树质量索引"""
        return MassIndex(self)

    def bounding_box(self, pad: float = 0.0) -> BoundingBox:
        lo = self.atoms.min(axis=0) - pad
        hi = self.atoms.max(axis=0) + pad
        hi = np.where(hi > lo, hi, lo + 1.0)
        return BoundingBox(tuple(lo), tuple(hi))

    def same_as(self, other: "DiscreteMeasure") -> bool:
        """原子顺序与权重完全一致"""
        return (self.atoms.shape == other.atoms.shape
                and np.array_equal(self.atoms, other.atoms)
                and np.array_equal(self.weights, other.weights))

    def __repr__(self) -> str:
        return f"DiscreteMeasure(n={self.size}, d={self.dim})"


class MassIndex:
    """
    基于 cKDTree 的球质量查询

    邻居下标按升序排列后组装为 CSR 矩阵，质量由矩阵乘权重得到，
    单点与批量查询走同一条路径，结果逐位一致。
    """

    def __init__(self, measure: DiscreteMeasure):
        self.measure = measure
        self.tree = cKDTree(measure.atoms)
        self._atom_masses = {}
        # 覆盖邻接按 (区域, 半径) 缓存，随索引一同释放
        self.plans = {}

    def neighbors(self, centers, r: float) -> csr_matrix:
        """
        每个中心的开球 B(c, r) 内的原子

        Returns:
            (len(centers), n_atoms) 的 0/1 CSR 矩阵，行内下标升序
        """
        pts = as_points(centers, self.measure.dim)
        lists = self.tree.query_ball_point(pts, open_radius(r), return_sorted=True)
        lengths = np.fromiter((len(l) for l in lists), dtype=np.int64, count=len(lists))
        indptr = np.zeros(len(lists) + 1, dtype=np.int64)
        np.cumsum(lengths, out=indptr[1:])
        if indptr[-1]:
            indices = np.concatenate([np.asarray(l, dtype=np.int64) for l in lists if len(l)])
        else:
            indices = np.zeros(0, dtype=np.int64)
        data = np.ones(len(indices), dtype=np.int8)
        return csr_matrix((data, indices, indptr), shape=(len(lists), self.measure.size))

    def ball_masses(self, centers, r: float) -> np.ndarray:
        """批量计算 π(B(c, r))"""
        adjacency = self.neighbors(centers, r)
        return adjacency.astype(np.float64) @ self.measure.weights

    def atom_masses(self, r: float) -> np.ndarray:
        """所有原子为中心的球质量，按半径缓存"""
        if r not in self._atom_masses:
            self._atom_masses[r] = self.ball_masses(self.measure.atoms, r)
            logger.debug(f"原子球质量: n={self.measure.size}, r={r:.6g}")
        return self._atom_masses[r]


@dataclass(frozen=True)
class Region:
    """
    有限个开球与网格单元的并集

    balls 中每项为 (center, radius)；radius=0 表示单点。
    cells 需要 frame 才能换算成绝对坐标。
    """
    balls: tuple = ()
    cells: tuple = ()
    frame: Optional[BoundingBox] = None

    def __post_init__(self):
        balls = tuple((tuple(float(c) for c in np.atleast_1d(center)), float(radius))
                      for center, radius in self.balls)
        cells = tuple(self.cells)
        if not balls and not cells:
            raise MeasureError("区域至少需要一个球或网格单元")
        if any(radius < 0 for _, radius in balls):
            raise MeasureError("球半径不能为负")
        if cells and self.frame is None:
            raise MeasureError("含网格单元的区域需要包围盒 frame")
        object.__setattr__(self, "balls", balls)
        object.__setattr__(self, "cells", cells)

    @classmethod
    def ball(cls, center, radius: float) -> "Region":
        return cls(balls=((center, radius),))

    @classmethod
    def from_cells(cls, cells: Iterable[GridCell], frame: BoundingBox) -> "Region":
        return cls(cells=tuple(cells), frame=frame)

    @classmethod
    def enclosing(cls, measure: DiscreteMeasure) -> "Region":
        """包含全部原子的单个球"""
        center = measure.atoms.mean(axis=0)
        radius = float(np.max(np.linalg.norm(measure.atoms - center, axis=1))) + 1.0
        return cls.ball(tuple(center), radius)

    def contains(self, points) -> np.ndarray:
        """逐点成员判定"""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        mask = np.zeros(pts.shape[0], dtype=bool)
        for center, radius in self.balls:
            dist = np.linalg.norm(pts - np.asarray(center), axis=1)
            if radius == 0:
                mask |= dist <= POINT_TOL
            else:
                mask |= dist < open_radius(radius)
        for cell in self.cells:
            inside = self.frame.contains(pts)
            if np.any(inside):
                hit = np.zeros_like(mask)
                hit[inside] = cell.contains(pts[inside], self.frame)
                mask |= hit
        return mask

    def atom_indices(self, measure: DiscreteMeasure) -> np.ndarray:
        """区域内原子的下标（升序）"""
        return np.flatnonzero(self.contains(measure.atoms))


def ball_mass(measure: DiscreteMeasure, x, r: float) -> float:
    """
    开欧氏球 B(x, r) 的质量

    Args:
        measure: 测度 π
        x: 球心
        r: 半径，r > 0

    Returns:
        球内原子权重之和，允许为 0
    """
    return float(measure.index.ball_masses(as_points(x, measure.dim), r)[0])


def region_mass(measure: DiscreteMeasure, region: Region) -> float:
    """区域内原子的精确权重和"""
    mask = region.contains(measure.atoms)
    return math.fsum(measure.weights[mask])


def enlarge(region: Region, alpha: float) -> Region:
    """
    E(α) 的外包：球半径加 α，网格单元换成以单元中心为心、半径为半对角线加 α 的球

    Args:
        region: 原区域
        alpha: 扩张量 α > 0

    Returns:
        只含球的新区域
    """
    if alpha <= 0:
        raise MeasureError(f"扩张量必须为正: {alpha}")
    balls = [(center, radius + alpha) for center, radius in region.balls]
    for cell in region.cells:
        balls.append((tuple(cell.center(region.frame)), cell.diameter(region.frame) / 2.0 + alpha))
    return Region(balls=tuple(balls))


def dirac(point) -> DiscreteMeasure:
    """单点测度 δ_x"""
    return DiscreteMeasure(atoms=as_points(point), weights=np.ones(1))


def uniform_grid_measure(lo: Sequence[float], hi: Sequence[float], base: int, level: int) -> DiscreteMeasure:
    """
    盒 [lo, hi] 上均匀分布的离散化：每个 b^-level 单元的中点放一个等权原子
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    n = base ** level
    axes = [lo[j] + (np.arange(n) + 0.5) * (hi[j] - lo[j]) / n for j in range(len(lo))]
    mesh = np.meshgrid(*axes, indexing="ij")
    atoms = np.stack([m.reshape(-1) for m in mesh], axis=1)
    weights = np.full(atoms.shape[0], 1.0 / atoms.shape[0])
    return DiscreteMeasure(atoms=atoms, weights=weights)
