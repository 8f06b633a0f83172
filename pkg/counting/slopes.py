"""
DimLab - 多重分形盒维数实验室

尺度序列与斜率提取 - 几何半径阶梯上的 liminf/limsup 估计
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.stats import linregress

from errors import MeasureError, TooFewScalesError

MIN_ENTRIES = 3


@dataclass(frozen=True)
class ScaleSeries:
    """半径阶梯 r_k = b^-k 上的正值序列"""
    base: int
    ks: tuple
    values: tuple
    label: str = ""

    def __post_init__(self):
        ks = tuple(int(k) for k in self.ks)
        values = tuple(float(v) for v in self.values)
        if len(ks) != len(values):
            raise MeasureError("尺度与取值数量不一致")
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise MeasureError(f"阶梯指数必须严格递增: {ks}")
        if any(not v > 0 or not math.isfinite(v) for v in values):
            raise MeasureError(f"序列取值必须为有限正数: {values}")
        object.__setattr__(self, "ks", ks)
        object.__setattr__(self, "values", values)

    @classmethod
    def sample(cls, base: int, k_lo: int, k_hi: int, fn: Callable[[float], float],
               label: str = "") -> "ScaleSeries":
        """在 k_lo..k_hi 上逐尺度求值"""
        ks = tuple(range(k_lo, k_hi + 1))
        return cls(base=base, ks=ks, values=tuple(fn(float(base) ** -k) for k in ks), label=label)

    @property
    def ladder(self) -> tuple[int, int, int]:
        return self.base, self.ks[0], self.ks[-1]

    @property
    def radii(self) -> np.ndarray:
        return float(self.base) ** -np.asarray(self.ks, dtype=float)

    @property
    def entries(self) -> list[tuple[float, float]]:
        return list(zip(self.radii.tolist(), self.values))

    def rows(self):
        """CSV 行: k, r, value, log_value, minus_log_r"""
        for k, r, v in zip(self.ks, self.radii, self.values):
            yield k, float(r), v, math.log(v), -math.log(r)


@dataclass(frozen=True)
class SlopeEstimate:
    """log 值对 -log r 的斜率区间：局部斜率的最小/最大与最小二乘斜率"""
    lower: float
    upper: float
    ols: float
    window: tuple
    series: Optional[ScaleSeries] = field(default=None, compare=False, repr=False)

    @classmethod
    def constant(cls, window: tuple, value: float = 0.0) -> "SlopeEstimate":
        return cls(lower=value, upper=value, ols=value, window=window)


def slope_bounds(series: ScaleSeries, k_lo: int = None) -> SlopeEstimate:
    """
    局部斜率 σ_k = [log v_{k+1} - log v_k] / [log r_k - log r_{k+1}]

    Args:
        series: 尺度序列
        k_lo: 起始指数，默认序列首项

    Returns:
        SlopeEstimate(lower=min σ, upper=max σ, ols=最小二乘斜率)

    Raises:
        TooFewScalesError: k ≥ k_lo 的点少于 3 个
    """
    ks = np.asarray(series.ks)
    keep = ks >= (ks[0] if k_lo is None else k_lo)
    if keep.sum() < MIN_ENTRIES:
        raise TooFewScalesError(f"k ≥ {k_lo} 只有 {int(keep.sum())} 个尺度，至少需要 {MIN_ENTRIES}")

    x = ks[keep] * math.log(series.base)
    y = np.log(np.asarray(series.values)[keep])
    local = np.diff(y) / np.diff(x)
    lower, upper = float(local.min()), float(local.max())
    ols = float(linregress(x, y).slope)
    # 等距阶梯上最小二乘斜率是局部斜率的凸组合，只需消除舍入误差
    ols = min(max(ols, lower), upper)
    return SlopeEstimate(lower=lower, upper=upper, ols=ols,
                         window=(int(ks[keep][0]), int(ks[keep][-1])), series=series)
