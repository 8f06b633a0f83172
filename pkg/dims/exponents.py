"""
DimLab - 多重分形盒维数实验室

标度指数 - 集合的多重分形盒维数、矩标度函数及其局部/极大版本、
D 指数及其一致/极大/极小版本、倍增比诊断

所有对不可数族的 inf/sup 都换成有限网、有限阶梯与单元并；
每个函数的文档注明估计相对真实量的方向。
"""
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from counting import ScaleSeries, SlopeEstimate, covering_sum, packing_sum, slope_bounds
from errors import EmptyNetError, EmptyRegionError
from logger import get_logger
from measure import DiscreteMeasure, Region, open_radius
from .types import SampleNet, ScaleConfig

logger = get_logger("dims")


@dataclass
class Extremum:
    """有限网上的极值及达到它的斜率估计"""
    value: float
    estimate: Optional[SlopeEstimate] = None
    where: Optional[int] = None


def _sample(cfg: ScaleConfig, fn: Callable[[float], float], label: str) -> ScaleSeries:
    return ScaleSeries.sample(cfg.base, cfg.k_lo, cfg.k_hi, fn, label=label)


def moment_series(measure: DiscreteMeasure, region: Region, q: float, cfg: ScaleConfig,
                  label: str = "") -> ScaleSeries:
    """r ↦ 覆盖和或填充和，在配置的阶梯上取样"""
    if cfg.mode == "covering":
        def fn(r):
            return covering_sum(measure, region, r, q, order=cfg.order)
    else:
        def fn(r):
            return packing_sum(measure, region, r, q, c=cfg.dilation, order=cfg.order)
    return _sample(cfg, fn, label or f"{cfg.mode}@q={q:g}")


def upper_dim(measure: DiscreteMeasure, region: Region, q: float, cfg: ScaleConfig) -> SlopeEstimate:
    """
    集合 E 的上 q 阶多重分形盒维数估计，主值为 upper

    Args:
        measure: 测度 π
        region: 集合 E
        q: 阶数
        cfg: 尺度配置

    Returns:
        完整的 SlopeEstimate
    """
    return slope_bounds(moment_series(measure, region, q, cfg))


def lower_dim(measure: DiscreteMeasure, region: Region, q: float, cfg: ScaleConfig) -> SlopeEstimate:
    """下 q 阶多重分形盒维数估计，主值为 lower；与 upper_dim 共用同一序列"""
    return upper_dim(measure, region, q, cfg)


def tau(measure: DiscreteMeasure, q: float, cfg: ScaleConfig) -> SlopeEstimate:
    """矩标度函数 τ(q)：E 取整个支撑"""
    return upper_dim(measure, Region.enclosing(measure), q, cfg)


def tau_loc_detail(measure: DiscreteMeasure, q: float, net: SampleNet, cfg: ScaleConfig) -> Extremum:
    """
    网中心上 upper_dim(π, K∩B(y_i, ρ), q) 的最小值

    有限网只能给出真实下确界的上界。邻域内无原子的中心跳过。
    """
    best = None
    for i, center in enumerate(net.centers):
        region = Region.ball(tuple(center), net.rho)
        try:
            estimate = upper_dim(measure, region, q, cfg)
        except EmptyRegionError:
            logger.debug(f"网点 {center} 的 ρ 邻域内没有原子，跳过")
            continue
        if best is None or estimate.upper < best.value:
            best = Extremum(estimate.upper, estimate, i)
    if best is None:
        raise EmptyNetError(f"采样网 {net.label} 的所有中心在 ρ={net.rho} 内都没有原子")
    return best


def tau_loc(measure: DiscreteMeasure, q: float, net: SampleNet, cfg: ScaleConfig) -> float:
    """局部上矩标度 τ_loc(q) 的有限网估计"""
    return tau_loc_detail(measure, q, net, cfg).value


def tau_loc_max_detail(measure: DiscreteMeasure, q: float, outer_net: SampleNet,
                       inner_net_builder: Callable, cfg: ScaleConfig) -> Extremum:
    """外层中心 y_j 上 tau_loc 的最大值，内层网由 inner_net_builder(y_j, ρ_outer) 给出"""
    best = None
    for j, center in enumerate(outer_net.centers):
        try:
            inner = inner_net_builder(center, outer_net.rho)
            local = tau_loc_detail(measure, q, inner, cfg)
        except EmptyNetError as e:
            logger.debug(f"外层网点 {center} 跳过: {e}")
            continue
        if best is None or local.value > best.value:
            best = Extremum(local.value, local.estimate, j)
    if best is None:
        raise EmptyNetError(f"外层网 {outer_net.label} 没有可用的内层网")
    return best


def tau_loc_max(measure: DiscreteMeasure, q: float, outer_net: SampleNet,
                inner_net_builder: Callable, cfg: ScaleConfig) -> float:
    """极大局部上矩标度 τ_loc,max(q) 的有限网估计"""
    return tau_loc_max_detail(measure, q, outer_net, inner_net_builder, cfg).value


class LocalMasses:
    """
    各尺度原子球质量在网点邻域上的 inf/sup

    centers 变体：原子 x ∈ B(y, ρ)；intersecting 变体：B(x, r) 与 B(y, ρ) 相交，即 ‖x - y‖ < ρ + r。
    """

    def __init__(self, measure: DiscreteMeasure, cfg: ScaleConfig):
        self.measure = measure
        self.cfg = cfg

    def _distances(self, centers: np.ndarray) -> np.ndarray:
        diff = self.measure.atoms[None, :, :] - centers[:, None, :]
        return np.linalg.norm(diff, axis=2)

    def extremes(self, centers: np.ndarray, rho: float, r: float) -> tuple[np.ndarray, np.ndarray]:
        """
        每个中心邻域内原子球质量的 (inf, sup)

        Raises:
            EmptyNetError: 某个中心邻域内没有原子
        """
        dist = self._distances(np.atleast_2d(centers))
        reach = rho + r if self.cfg.variant == "intersecting" else rho
        near = dist < open_radius(reach)
        empty = ~near.any(axis=1)
        if np.any(empty):
            raise EmptyNetError(f"{int(empty.sum())} 个网点的邻域 ρ={rho} 内没有原子")
        masses = self.measure.index.atom_masses(r)[None, :]
        inf = np.where(near, masses, np.inf).min(axis=1)
        sup = np.where(near, masses, -np.inf).max(axis=1)
        return inf, sup


def d_extremes(measure: DiscreteMeasure, cfg: ScaleConfig,
               variant: str = None) -> tuple[SlopeEstimate, SlopeEstimate]:
    """
    D 指数 D̄(−∞) 与 D(+∞)

    序列 1/inf_x π(B(x,r)) 与 1/sup_x π(B(x,r))（x 取遍原子）；
    D_minus 取前者的 upper，D_plus 取后者的 lower。全局版本与 variant 无关。

    Returns:
        (inf 序列的估计, sup 序列的估计)
    """
    index = measure.index
    inf_series = _sample(cfg, lambda r: 1.0 / float(index.atom_masses(r).min()), "inf-mass")
    sup_series = _sample(cfg, lambda r: 1.0 / float(index.atom_masses(r).max()), "sup-mass")
    return slope_bounds(inf_series), slope_bounds(sup_series)


def _net_series(local: LocalMasses, net: SampleNet, cfg: ScaleConfig, sign: str) -> ScaleSeries:
    """
    一个网的聚合序列

    minus: inf_i log(inf 质量)/log r 对应 max_i inf 质量；
    plus: sup_i log(sup 质量)/log r 对应 min_i sup 质量。
    """
    def fn(r):
        inf, sup = local.extremes(net.centers, net.rho, r)
        return 1.0 / float(inf.max() if sign == "minus" else sup.min())
    return _sample(cfg, fn, f"unif-{sign}:{net.label}")


def d_unif_detail(measure: DiscreteMeasure, nets: Sequence[SampleNet], cfg: ScaleConfig,
                  sign: str, local: Optional[LocalMasses] = None) -> Extremum:
    """一致 D 指数：minus 取各网 upper 的最小值，plus 取各网 lower 的最大值"""
    if not nets:
        raise EmptyNetError("没有提供采样网")
    local = local or LocalMasses(measure, cfg)
    best = None
    for i, net in enumerate(nets):
        estimate = slope_bounds(_net_series(local, net, cfg, sign))
        value = estimate.upper if sign == "minus" else estimate.lower
        if best is None or (value < best.value if sign == "minus" else value > best.value):
            best = Extremum(value, estimate, i)
    return best


def d_unif(measure: DiscreteMeasure, nets: Sequence[SampleNet], cfg: ScaleConfig, sign: str) -> float:
    """
    D̄_unif(−∞)（sign="minus"）或 D_unif(+∞)（sign="plus"）

    Raises:
        EmptyNetError: 网为空或某网点邻域无原子
    """
    return d_unif_detail(measure, nets, cfg, sign).value


def d_unif_max_min_detail(measure: DiscreteMeasure, outer_net: SampleNet,
                          inner_nets: Sequence[SampleNet], cfg: ScaleConfig) -> dict:
    """
    极大/极小版本的四个量

    外层 (z, κ) 取遍 outer_net；内层网限制在 B(z, κ) 中。
    "max" 版本对外层取最大，"min" 版本对外层取最小。

    Returns:
        {"D_unif_max_minus", "D_max_minus", "D_unif_min_plus", "D_min_plus"} → Extremum
    """
    local = LocalMasses(measure, cfg)
    kappa = outer_net.rho
    result = {}

    def update(name, value, estimate, j, larger):
        current = result.get(name)
        if current is None or (value > current.value if larger else value < current.value):
            result[name] = Extremum(value, estimate, j)

    for j, z in enumerate(outer_net.centers):
        restricted = [n for n in (net.within(z, kappa) for net in inner_nets) if n is not None]
        if restricted:
            minus = d_unif_detail(measure, restricted, cfg, "minus", local)
            plus = d_unif_detail(measure, restricted, cfg, "plus", local)
            update("D_unif_max_minus", minus.value, minus.estimate, j, larger=True)
            update("D_unif_min_plus", plus.value, plus.estimate, j, larger=False)

        zc = z.reshape(1, -1)
        inf_series = _sample(cfg, lambda r: 1.0 / float(local.extremes(zc, kappa, r)[0][0]),
                             f"max-minus@{j}")
        sup_series = _sample(cfg, lambda r: 1.0 / float(local.extremes(zc, kappa, r)[1][0]),
                             f"min-plus@{j}")
        inf_est, sup_est = slope_bounds(inf_series), slope_bounds(sup_series)
        update("D_max_minus", inf_est.upper, inf_est, j, larger=True)
        update("D_min_plus", sup_est.lower, sup_est, j, larger=False)

    if "D_unif_max_minus" not in result:
        raise EmptyNetError("没有任何外层球包含内层网点")
    return result


def d_unif_max_min(measure: DiscreteMeasure, outer_net: SampleNet,
                   inner_nets: Sequence[SampleNet], cfg: ScaleConfig) -> tuple[float, float, float, float]:
    """(D_unif_max_minus, D_max_minus, D_unif_min_plus, D_min_plus)"""
    d = d_unif_max_min_detail(measure, outer_net, inner_nets, cfg)
    return (d["D_unif_max_minus"].value, d["D_max_minus"].value,
            d["D_unif_min_plus"].value, d["D_min_plus"].value)


@dataclass
class DoublingResult:
    """倍增比诊断"""
    max_ratio: float
    skipped: int
    evaluated: int


def doubling_detail(measure: DiscreteMeasure, sample, cfg: ScaleConfig) -> DoublingResult:
    """样本点与阶梯半径上 π(B(x,2r))/π(B(x,r)) 的最大值，分母为 0 的跳过"""
    pts = np.atleast_2d(np.asarray(sample, dtype=float))
    if pts.shape[1] != measure.dim:
        pts = pts.reshape(-1, measure.dim)
    ratio, skipped, evaluated = 1.0, 0, 0
    for k in cfg.ks:
        r = cfg.radius(k)
        inner = measure.index.ball_masses(pts, r)
        outer = measure.index.ball_masses(pts, 2.0 * r)
        ok = inner > 0
        skipped += int((~ok).sum())
        evaluated += int(ok.sum())
        if np.any(ok):
            ratio = max(ratio, float(np.max(outer[ok] / inner[ok])))
    if skipped:
        logger.warning(f"倍增比: {skipped} 个 (样本点, 半径) 组合的球质量为 0，已跳过")
    return DoublingResult(max_ratio=ratio, skipped=skipped, evaluated=evaluated)


def doubling_ratio(measure: DiscreteMeasure, sample, cfg: ScaleConfig) -> float:
    """经验倍增常数，是真实常数的下界"""
    return doubling_detail(measure, sample, cfg).max_ratio
