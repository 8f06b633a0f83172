"""
维数模块
提供多重分形盒维数、矩标度函数、D 指数、倍增诊断与测度的小/大维数
"""
from .types import ScaleConfig, SampleNet, DimReport, ReportEntry
from .nets import (
    point_net, cylinder_net, atom_net, atom_net_builder, cylinder_net_builder,
    cylinder_representatives,
)
from .exponents import (
    Extremum, moment_series, upper_dim, lower_dim, tau, tau_loc, tau_loc_max,
    d_extremes, d_unif, d_unif_max_min, doubling_ratio, doubling_detail,
)
from .measure_dims import MeasureDimsAnalysis, measure_dims, big_dim_trend
from .typical import typical_predictions
from .report import ReportInputs, ReportBuilder

__all__ = [
    'ScaleConfig',
    'SampleNet',
    'DimReport',
    'ReportEntry',
    'point_net',
    'cylinder_net',
    'atom_net',
    'atom_net_builder',
    'cylinder_net_builder',
    'cylinder_representatives',
    'Extremum',
    'moment_series',
    'upper_dim',
    'lower_dim',
    'tau',
    'tau_loc',
    'tau_loc_max',
    'd_extremes',
    'd_unif',
    'd_unif_max_min',
    'doubling_ratio',
    'doubling_detail',
    'MeasureDimsAnalysis',
    'measure_dims',
    'big_dim_trend',
    'typical_predictions',
    'ReportInputs',
    'ReportBuilder',
]
