"""
计数模块
提供覆盖/填充矩和与尺度序列的斜率提取
"""
from .sums import (
    PackingResult, CoverResult,
    greedy_packing, greedy_cover, packing_sum, covering_sum, grid_moment_sum,
)
from .slopes import ScaleSeries, SlopeEstimate, slope_bounds

__all__ = [
    'PackingResult',
    'CoverResult',
    'greedy_packing',
    'greedy_cover',
    'packing_sum',
    'covering_sum',
    'grid_moment_sum',
    'ScaleSeries',
    'SlopeEstimate',
    'slope_bounds',
]
