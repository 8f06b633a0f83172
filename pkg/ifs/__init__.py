"""
自相似模块
提供相似映射、柱集参数、测度离散化与开集条件检查
"""
from .model import (
    Similarity, IFSModel, Word, similarity_1d,
    apply_word, cylinder_params, words, build_measure, s_extremes, resolution_limit,
)
from .osc import OSCReport, verify_osc
from .loader import load_ifs, parse_ifs, parse_box

__all__ = [
    'Similarity',
    'IFSModel',
    'Word',
    'similarity_1d',
    'apply_word',
    'cylinder_params',
    'words',
    'build_measure',
    's_extremes',
    'resolution_limit',
    'OSCReport',
    'verify_osc',
    'load_ifs',
    'parse_ifs',
    'parse_box',
]
