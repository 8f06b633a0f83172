"""
度量模块
提供有限支撑测度间的精确 Fortet-Mourier 距离与扩张界检查
"""
from .fortet_mourier import LipschitzWitness, EnlargementReport, fortet_mourier, enlargement_check

__all__ = [
    'LipschitzWitness',
    'EnlargementReport',
    'fortet_mourier',
    'enlargement_check',
]
