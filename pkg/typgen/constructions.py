"""
DimLab - 多重分形盒维数实验室

典型测度构造 - 加权填充测度、混合、有限网测度与局部化混合
"""
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from config import config
from counting import greedy_packing
from errors import ConfigError, MeasureError, ScanExhaustedError, SupportConditionError
from logger import get_logger
from measure import DiscreteMeasure, Region, ball_mass, dirac

logger = get_logger("typgen")

WEIGHT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class WeightedPackingMeasure:
    """
    以 x 为基点、尺度 s 的加权填充测度

    中心 Λ 为 B(x,s) 内半径 r_xs 的贪心填充，权重正比于 π(B(z, r_xs))^q，
    且 Σ π(B(z, r_xs))^q ≥ r_xs^{-t}。
    """
    base_point: tuple
    scale: float
    radius: float
    centers: np.ndarray
    weights: np.ndarray
    q: float
    target: float
    moment: float = 0.0

    @property
    def measure(self) -> DiscreteMeasure:
        return DiscreteMeasure(atoms=self.centers, weights=self.weights)

    @property
    def header(self) -> dict:
        """写入测度文件的来源信息"""
        return {
            "x": " ".join(repr(float(c)) for c in self.base_point),
            "s": repr(self.scale),
            "q": repr(self.q),
            "t": repr(self.target),
            "r_xs": repr(self.radius),
        }


def _packing_moment(pi: DiscreteMeasure, centers: np.ndarray, r: float, q: float) -> tuple[np.ndarray, float]:
    masses = pi.index.ball_masses(centers, r)
    powered = masses ** q
    return powered, math.fsum(powered)


def weighted_packing_measure(pi: DiscreteMeasure, x, s: float, q: float, t: float,
                             base: int = None, j_max: int = None) -> WeightedPackingMeasure:
    """
    沿 r = s·b^-j（j = 1, 2, ...）扫描，取第一个满足 Σ π(B(z,r))^q ≥ r^-t 的贪心填充

    Args:
        pi: 参考测度 π
        x: 基点
        s: 尺度
        q: 阶数
        t: 目标指数
        base: 阶梯进制，默认取配置
        j_max: 扫描上限，默认 40

    Raises:
        ScanExhaustedError: 扫描到 j_max 仍不满足
    """
    base = base or config.get("grid", "base", default=3)
    j_max = j_max or config.get("typgen", "j_max", default=40)
    point = tuple(float(c) for c in np.atleast_1d(x))
    region = Region.ball(point, s)

    for j in range(1, j_max + 1):
        r = s * float(base) ** -j
        packing = greedy_packing(pi, region, r, q)
        powered, moment = _packing_moment(pi, packing.centers, r, q)
        if moment >= r ** -t:
            logger.info(f"加权填充测度: x={point}, s={s}, j={j}, r={r:.6g}, 中心数={packing.count}")
            return WeightedPackingMeasure(
                base_point=point, scale=s, radius=r, centers=packing.centers,
                weights=powered / moment, q=q, target=t, moment=moment,
            )
        logger.debug(f"j={j}: Σ={moment:.6g} < r^-t={r ** -t:.6g}")

    raise ScanExhaustedError(f"target exponent unreachable at this depth: t={t} 在 j ≤ {j_max} 内无法达到")


def verify_radius_condition(pi: DiscreteMeasure, wpm: WeightedPackingMeasure) -> bool:
    """逐球重新计算质量，复核 Σ π(B(z, r_xs))^q ≥ r_xs^-t 与中心分离"""
    moment = math.fsum(ball_mass(pi, z, wpm.radius) ** wpm.q for z in wpm.centers)
    separated = True
    for i in range(len(wpm.centers)):
        for j in range(i + 1, len(wpm.centers)):
            if np.linalg.norm(wpm.centers[i] - wpm.centers[j]) <= 2.0 * wpm.radius:
                separated = False
    return moment >= wpm.radius ** -wpm.target and separated


def mix(components: Sequence[tuple]) -> DiscreteMeasure:
    """
    混合 Σ p_x μ_x，重合原子合并，保持首次出现的顺序

    Args:
        components: [(权重, DiscreteMeasure), ...]

    Raises:
        MeasureError: 权重非正或和不为 1
    """
    if not components:
        raise MeasureError("混合至少需要一个分量")
    probs = [float(p) for p, _ in components]
    if any(p <= 0 for p in probs) or abs(math.fsum(probs) - 1.0) > WEIGHT_TOL:
        raise MeasureError(f"混合权重必须为正且和为 1: {probs}")

    atoms = np.concatenate([m.atoms for _, m in components], axis=0)
    weights = np.concatenate([p * m.weights for p, (_, m) in zip(probs, components)])
    _, first, inverse = np.unique(atoms, axis=0, return_index=True, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    order = np.argsort(first, kind="stable")
    merged = np.array([math.fsum(weights[inverse == g]) for g in order])
    return DiscreteMeasure(atoms=atoms[first[order]], weights=merged)


def packing_mixture(pi: DiscreteMeasure, points: Sequence, probs: Sequence[float], s: float,
                    q: float, t: float, region: Optional[Region] = None,
                    base: int = None) -> tuple[DiscreteMeasure, float]:
    """
    Σ_{x∈A} p_x μ_{x,s}；x 不在 region 内时取 μ_{x,s} = δ_x、r_{x,s} = s

    Returns:
        (混合测度, r_{A,s} = min_x r_{x,s})
    """
    if len(points) != len(probs):
        raise MeasureError("点数与权重数不一致")
    components, radii = [], []
    for x, p in zip(points, probs):
        if region is not None and not region.contains(np.atleast_2d(x))[0]:
            components.append((p, dirac(x)))
            radii.append(s)
            continue
        wpm = weighted_packing_measure(pi, x, s, q, t, base=base)
        components.append((p, wpm.measure))
        radii.append(wpm.radius)
    return mix(components), min(radii)


def finite_net_measure(sample: Sequence, n: int, weights=None) -> DiscreteMeasure:
    """
    前 n 个样本点上的有限支撑测度 Σ p_i δ_{x_i}

    Args:
        sample: 样本点序列
        n: 使用的点数
        weights: 权重列表，None 表示均匀

    Raises:
        MeasureError: n 超过样本量或权重数量/取值不合法
    """
    pts = np.asarray(sample, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if not 1 <= n <= len(pts):
        raise MeasureError(f"n={n} 超出样本量 {len(pts)}")
    if weights is None or isinstance(weights, str):
        w = np.full(n, 1.0 / n)
    else:
        w = np.asarray(weights, dtype=float)
        if len(w) != n:
            raise MeasureError(f"权重数 {len(w)} 与 n={n} 不一致")
    return DiscreteMeasure(atoms=pts[:n], weights=w)


def localized_mixture(pi: Optional[DiscreteMeasure], z, kappa: float, lam: float,
                      inner: DiscreteMeasure, outer: DiscreteMeasure,
                      margin: float = None, inner_radius: float = None) -> DiscreteMeasure:
    """
    λ·inner + (1-λ)·outer，inner 支撑在 B(z,κ) 内，outer 支撑在 B(z, κ+margin) 外

    Args:
        pi: 参考测度，给出时要求两个分量的原子都落在其包围盒内
        z: 中心
        kappa: 内球半径 κ
        lam: 混合系数 λ ∈ (0, 1]
        inner: 内层测度
        outer: 外层测度
        margin: 分离余量，默认 margin_factor · inner_radius
        inner_radius: 内层构造的半径 r_n（填充测度的 r_xs 或混合的 r_A）

    Raises:
        SupportConditionError: 支撑条件不满足，offending 列出违例原子
        ConfigError: λ < 1 时 margin 与 inner_radius 都未给出
    """
    if not 0.0 < lam <= 1.0:
        raise MeasureError(f"λ 必须在 (0,1] 内: {lam}")
    center = np.atleast_1d(np.asarray(z, dtype=float))

    inside = np.linalg.norm(inner.atoms - center, axis=1) < kappa
    if not np.all(inside):
        raise SupportConditionError(f"内层测度有原子不在 B(z, {kappa}) 内",
                                    inner.atoms[~inside].tolist())
    if pi is not None:
        box = pi.bounding_box()
        for name, m in (("inner", inner), ("outer", outer)):
            ok = box.contains(m.atoms)
            if not np.all(ok):
                raise SupportConditionError(f"{name} 测度有原子在 π 的包围盒之外", m.atoms[~ok].tolist())
    if lam == 1.0:
        return inner

    if margin is None:
        if inner_radius is None:
            raise ConfigError("局部化混合需要 margin 或内层构造半径 inner_radius")
        margin = config.get("typgen", "margin_factor", default=2.0) * inner_radius
    if margin < 0:
        raise MeasureError(f"分离余量不能为负: {margin}")
    far = np.linalg.norm(outer.atoms - center, axis=1) >= kappa + margin
    if not np.all(far):
        raise SupportConditionError(f"外层测度有原子落在 B(z, {kappa + margin}) 内",
                                    outer.atoms[~far].tolist())
    return mix([(lam, inner), (1.0 - lam, outer)])
