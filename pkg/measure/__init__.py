"""
测度核心模块
提供离散测度、区域、球质量查询与网格离散化
"""
from .grid import BoundingBox, GridCell, GridMeasure, to_grid, cell_indices
from .core import (
    Point, DiscreteMeasure, MassIndex, Region,
    ball_mass, region_mass, enlarge, dirac, uniform_grid_measure, open_radius,
)
from .io import save_measure, load_measure, read_header

__all__ = [
    'Point',
    'DiscreteMeasure',
    'MassIndex',
    'Region',
    'BoundingBox',
    'GridCell',
    'GridMeasure',
    'to_grid',
    'cell_indices',
    'ball_mass',
    'region_mass',
    'enlarge',
    'dirac',
    'uniform_grid_measure',
    'open_radius',
    'save_measure',
    'load_measure',
    'read_header',
]
