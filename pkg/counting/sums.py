"""
DimLab - 多重分形盒维数实验室

覆盖与填充矩和 - 贪心填充、贪心覆盖与网格精确计数
"""
import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.spatial import cKDTree

from config import config
from errors import DomainError, EmptyRegionError, MeasureError
from logger import get_logger
from measure import DiscreteMeasure, Region, open_radius, to_grid
from measure.core import RADIUS_RTOL

logger = get_logger("counting")

ORDERS = ("mass", "lexicographic")
PLAN_CACHE = 64
_plan_lock = threading.Lock()


@dataclass
class PackingResult:
    """以 E 中原子为中心、两两距离 > 2r 的极大填充"""
    centers: np.ndarray
    indices: np.ndarray   # 中心在测度原子数组中的下标
    radius: float
    separation_ok: bool

    @property
    def count(self) -> int:
        return len(self.indices)


@dataclass
class CoverResult:
    """贪心覆盖：中心按选取顺序排列"""
    centers: np.ndarray
    indices: np.ndarray
    radius: float

    @property
    def count(self) -> int:
        return len(self.indices)


def _default_order(order):
    order = order or config.get("counting", "order", default="mass")
    if order not in ORDERS:
        raise MeasureError(f"未知排序方式: {order}")
    return order


def _region_atoms(measure: DiscreteMeasure, region: Region) -> np.ndarray:
    idx = region.atom_indices(measure)
    if len(idx) == 0:
        raise EmptyRegionError("区域内没有测度的原子")
    return idx


def _rank(points: np.ndarray, masses: np.ndarray, descending: bool, order: str) -> np.ndarray:
    """
    候选排序：先按球质量（升序或降序），再按坐标字典序

    Returns:
        排好序的位置数组
    """
    keys = [points[:, j] for j in reversed(range(points.shape[1]))]
    if order == "mass":
        keys.append(-masses if descending else masses)
    return np.lexsort(keys)


def _cover_plan(index, region: Region, r: float):
    """区域内原子及其两两开球邻接矩阵，缓存在索引上，最多保留 PLAN_CACHE 个"""
    key = (region, r)
    with _plan_lock:
        plan = index.plans.get(key)
    if plan is not None:
        return plan
    measure = index.measure
    idx = _region_atoms(measure, region)
    pts = measure.atoms[idx]
    lists = cKDTree(pts).query_ball_point(pts, open_radius(r), return_sorted=True)
    indptr = np.zeros(len(lists) + 1, dtype=np.int64)
    np.cumsum([len(l) for l in lists], out=indptr[1:])
    indices = np.concatenate([np.asarray(l, dtype=np.int64) for l in lists])
    adjacency = csr_matrix((np.ones(len(indices), dtype=np.int8), indices, indptr),
                           shape=(len(idx), len(idx)))
    with _plan_lock:
        if len(index.plans) >= PLAN_CACHE:
            index.plans.pop(next(iter(index.plans)))
        index.plans[key] = (idx, adjacency)
    return idx, adjacency


def greedy_packing(measure: DiscreteMeasure, region: Region, r: float, q: float,
                   order: str = None) -> PackingResult:
    """
    贪心构造 E 中原子的极大 2r 分离子集

    q ≥ 0 时按球质量降序、q < 0 时按升序处理候选，再按坐标字典序；
    被接受中心 2r 以内的原子全部封锁。

    Args:
        measure: 测度 π
        region: 目标区域 E
        r: 球半径
        q: 矩阶数，只影响候选顺序
        order: "mass" 或 "lexicographic"

    Raises:
        EmptyRegionError: E 内没有原子
    """
    order = _default_order(order)
    idx = _region_atoms(measure, region)
    pts = measure.atoms[idx]
    masses = measure.index.atom_masses(r)[idx]
    ranking = _rank(pts, masses, descending=q >= 0, order=order)

    local_tree = cKDTree(pts)
    block_radius = 2.0 * r * (1.0 + RADIUS_RTOL)
    blocked = np.zeros(len(idx), dtype=bool)
    accepted = []
    for pos in ranking:
        if blocked[pos]:
            continue
        accepted.append(pos)
        blocked[local_tree.query_ball_point(pts[pos], block_radius)] = True

    accepted = np.asarray(accepted, dtype=np.int64)
    centers = pts[accepted]
    separation_ok = True
    if len(accepted) > 1:
        gaps = cKDTree(centers).query(centers, k=2)[0][:, 1]
        separation_ok = bool(np.all(gaps > 2.0 * r))
    return PackingResult(centers=centers, indices=idx[accepted], radius=r,
                         separation_ok=separation_ok)


def _moment(masses: np.ndarray, q: float) -> float:
    if q < 0 and np.any(masses <= 0):
        raise DomainError(f"存在零质量球，q={q} < 0 时 0^q 无定义")
    if q == 0:
        return float(len(masses))
    return math.fsum(masses ** q)


def packing_sum(measure: DiscreteMeasure, region: Region, r: float, q: float,
                c: float = 1.0, order: str = None) -> float:
    """
    填充矩和 Σ π(B(x_i, c·r))^q，x_i 为贪心填充中心

    Raises:
        DomainError: q < 0 且某个膨胀球质量为 0
    """
    packing = greedy_packing(measure, region, r, q, order=order)
    masses = measure.index.ball_masses(packing.centers, c * r)
    value = _moment(masses, q)
    logger.debug(f"填充和: r={r:.6g}, q={q}, c={c}, 中心数={packing.count}, 值={value:.6g}")
    return value


def greedy_cover(measure: DiscreteMeasure, region: Region, r: float, q: float,
                 order: str = None) -> CoverResult:
    """
    以 E 中原子为中心的贪心覆盖

    每步选覆盖未覆盖原子最多的球；并列时 q ≥ 0 取球质量小者，
    q < 0 取球质量大者，再按坐标字典序。
    """
    order = _default_order(order)
    idx, adjacency = _cover_plan(measure.index, region, float(r))
    pts = measure.atoms[idx]
    masses = measure.index.atom_masses(r)[idx]
    ranking = _rank(pts, masses, descending=q < 0, order=order)
    rank_pos = np.empty(len(idx), dtype=np.int64)
    rank_pos[ranking] = np.arange(len(idx))

    indptr, indices = adjacency.indptr, adjacency.indices
    counts = np.diff(indptr).astype(np.int64)
    uncovered = np.ones(len(idx), dtype=bool)
    remaining = len(idx)
    chosen = []
    while remaining:
        best = counts.max()
        candidates = np.flatnonzero(counts == best)
        pick = candidates[np.argmin(rank_pos[candidates])]
        chosen.append(pick)
        row = indices[indptr[pick]:indptr[pick + 1]]
        newly = row[uncovered[row]]
        uncovered[newly] = False
        remaining -= len(newly)
        # 邻接对称：新覆盖原子所在行即包含它们的候选球
        counts -= np.bincount(adjacency[newly].indices, minlength=len(idx))

    chosen = np.asarray(chosen, dtype=np.int64)
    return CoverResult(centers=pts[chosen], indices=idx[chosen], radius=r)


def covering_sum(measure: DiscreteMeasure, region: Region, r: float, q: float,
                 order: str = None) -> float:
    """
    覆盖矩和 Σ π(B(x_i, r))^q 的贪心上界

    Args:
        measure: 测度 π
        region: 目标区域 E
        r: 球半径
        q: 矩阶数
        order: "mass" 或 "lexicographic"

    Returns:
        贪心覆盖的矩和
    """
    cover = greedy_cover(measure, region, r, q, order=order)
    masses = measure.index.atom_masses(r)[cover.indices]
    value = _moment(masses, q)
    logger.debug(f"覆盖和: r={r:.6g}, q={q}, 球数={cover.count}, 值={value:.6g}")
    return value


def grid_moment_sum(measure: DiscreteMeasure, base: int, level: int, q: float, frame=None) -> float:
    """网格单元质量的精确矩和 Σ μ(cell)^q，作为覆盖和的暴力对照"""
    return to_grid(measure, base, level, frame).moment_sum(q)
