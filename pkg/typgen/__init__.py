"""
典型测度构造模块
"""
from .constructions import (
    WeightedPackingMeasure, weighted_packing_measure, verify_radius_condition,
    mix, packing_mixture, finite_net_measure, localized_mixture,
)

__all__ = [
    'WeightedPackingMeasure',
    'weighted_packing_measure',
    'verify_radius_condition',
    'mix',
    'packing_mixture',
    'finite_net_measure',
    'localized_mixture',
]
