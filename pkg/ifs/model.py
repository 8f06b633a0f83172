"""
DimLab - 多重分形盒维数实验室

自相似迭代函数系统 - 相似映射、柱集组合与吸引子离散化
"""
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from config import config
from errors import AtomCapError, MeasureError, WordError
from logger import get_logger
from measure import BoundingBox, DiscreteMeasure

logger = get_logger("ifs")

ORTHO_TOL = 1e-9

Word = tuple


@dataclass(frozen=True)
class Similarity:
    """相似映射 x ↦ ratio·O·x + translation"""
    ratio: float
    orthogonal: tuple
    translation: tuple

    def __post_init__(self):
        t = tuple(float(v) for v in np.atleast_1d(self.translation))
        d = len(t)
        if self.orthogonal is None:
            o = np.eye(d)
        else:
            o = np.asarray(self.orthogonal, dtype=float).reshape(d, d)
        if not 0.0 < self.ratio < 1.0:
            raise MeasureError(f"压缩比必须在 (0,1) 内: {self.ratio}")
        if not np.allclose(o @ o.T, np.eye(d), atol=ORTHO_TOL, rtol=0.0):
            raise MeasureError(f"正交部分不是正交矩阵: {o.tolist()}")
        object.__setattr__(self, "ratio", float(self.ratio))
        object.__setattr__(self, "orthogonal", tuple(tuple(row) for row in o.tolist()))
        object.__setattr__(self, "translation", t)

    @property
    def dim(self) -> int:
        return len(self.translation)

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.orthogonal)

    def apply(self, points: np.ndarray) -> np.ndarray:
        """作用于 (n, d) 点阵"""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return self.ratio * (pts @ self.matrix.T) + np.asarray(self.translation)

    def fixed_point(self) -> np.ndarray:
        a = np.eye(self.dim) - self.ratio * self.matrix
        return np.linalg.solve(a, np.asarray(self.translation))

    @property
    def is_signed_permutation(self) -> bool:
        o = self.matrix
        rounded = np.round(o)
        if not np.allclose(o, rounded, atol=ORTHO_TOL, rtol=0.0):
            return False
        return bool(np.all(np.abs(rounded).sum(axis=1) == 1))


@dataclass(frozen=True)
class IFSModel:
    """M ≥ 2 个相似映射及其概率向量"""
    maps: tuple
    probs: tuple

    def __post_init__(self):
        maps = tuple(self.maps)
        probs = tuple(float(p) for p in self.probs)
        if len(maps) < 2:
            raise MeasureError("IFS 至少需要两个映射")
        if len(maps) != len(probs):
            raise MeasureError(f"映射数 {len(maps)} 与概率数 {len(probs)} 不一致")
        if any(p <= 0 for p in probs):
            raise MeasureError("概率必须全部为正")
        if abs(math.fsum(probs) - 1.0) > 1e-9:
            raise MeasureError(f"概率和为 {math.fsum(probs)}")
        if len({m.dim for m in maps}) != 1:
            raise MeasureError("映射的维数不一致")
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "probs", probs)

    @property
    def size(self) -> int:
        return len(self.maps)

    @property
    def dim(self) -> int:
        return self.maps[0].dim

    @property
    def ratios(self) -> np.ndarray:
        return np.array([m.ratio for m in self.maps])

    def bounding_box(self) -> BoundingBox:
        """
        由不动点几何得到的包围盒

        以各不动点的重心 c 为中心，R = max_m |S_m(c) - c| / (1 - r_m)，
        则球 B(c, R) 在所有映射下不变，吸引子含于 [c-R, c+R]^d。
        """
        c = np.mean([m.fixed_point() for m in self.maps], axis=0)
        radius = max(
            float(np.linalg.norm(m.apply(c)[0] - c)) / (1.0 - m.ratio) for m in self.maps
        )
        radius = radius if radius > 0 else 1.0
        return BoundingBox(tuple(c - radius), tuple(c + radius))


def similarity_1d(ratio: float, translation: float) -> Similarity:
    """一维相似映射的便捷构造"""
    return Similarity(ratio=ratio, orthogonal=((1.0,),), translation=(translation,))


def _check_word(ifs: IFSModel, w: Sequence[int]) -> tuple:
    word = tuple(int(m) for m in w)
    bad = [m for m in word if not 1 <= m <= ifs.size]
    if bad:
        raise WordError(f"字母 {bad} 超出范围 1..{ifs.size}")
    return word


def apply_word(ifs: IFSModel, w: Sequence[int], x) -> np.ndarray:
    """
    S_w(x) = S_{m_1} ∘ ... ∘ S_{m_n}(x)，空字返回 x

    Raises:
        WordError: 字母越界
    """
    word = _check_word(ifs, w)
    pt = np.atleast_1d(np.asarray(x, dtype=float)).reshape(1, -1)
    for m in reversed(word):
        pt = ifs.maps[m - 1].apply(pt)
    return pt[0]


def cylinder_params(ifs: IFSModel, w: Sequence[int]) -> tuple[float, float]:
    """
    柱集参数 (p_w, r_w)，按字母从左到右连乘

    Returns:
        空字返回 (1.0, 1.0)
    """
    word = _check_word(ifs, w)
    p, r = 1.0, 1.0
    for m in word:
        p *= ifs.probs[m - 1]
        r *= ifs.maps[m - 1].ratio
    return p, r


def words(ifs: IFSModel, depth: int):
    """按字典序枚举长度为 depth 的字"""
    return itertools.product(range(1, ifs.size + 1), repeat=depth)


def build_measure(ifs: IFSModel, depth: int, atom_cap: int = None) -> DiscreteMeasure:
    """
    自相似测度的深度 n 离散化

    每个长度为 n 的字 w 在 S_w(x_0) 放一个权重 p_w 的原子，x_0 为 S_1 的不动点。
    原子按字的字典序排列。

    Args:
        ifs: 迭代函数系统
        depth: 构建深度 n ≥ 0
        atom_cap: 原子数上限，默认取配置

    Raises:
        AtomCapError: M^n 超过上限
    """
    if depth < 0:
        raise MeasureError(f"深度不能为负: {depth}")
    cap = atom_cap or config.get("ifs", "atom_cap", default=2_000_000)
    count = ifs.size ** depth
    if count > cap:
        raise AtomCapError(f"深度 {depth} 需要 {count} 个原子，超过上限 {cap}")

    points = ifs.maps[0].fixed_point().reshape(1, -1)
    weights = np.ones(1)
    probs = np.asarray(ifs.probs)
    for _ in range(depth):
        # 前置首字母得到位置，后置末字母得到权重；两者都保持字典序
        points = np.concatenate([m.apply(points) for m in ifs.maps], axis=0)
        weights = (weights[:, None] * probs[None, :]).reshape(-1)

    logger.info(f"构建自相似测度: M={ifs.size}, 深度={depth}, 原子数={count}")
    return DiscreteMeasure(atoms=points, weights=weights)


def s_extremes(ifs: IFSModel) -> tuple[float, float]:
    """s_min, s_max = min/max_m log p_m / log r_m"""
    values = [math.log(p) / math.log(m.ratio) for p, m in zip(ifs.probs, ifs.maps)]
    return min(values), max(values)


def resolution_limit(ifs: IFSModel, depth: int, base: int, guard_steps: int) -> int:
    """
    原子分辨率保护允许的最大阶梯指数

    深度 n 的离散化只能分辨到 r_max^n 量级，k_hi 不能超过
    floor(n·log(1/r_max)/log b) - guard_steps。
    """
    r_max = float(ifs.ratios.max())
    resolved = math.floor(depth * math.log(1.0 / r_max) / math.log(base) + 1e-9)
    return resolved - guard_steps
