"""
DimLab - 多重分形盒维数实验室

采样网构造
"""
from typing import Callable, Optional, Sequence

import numpy as np

from errors import EmptyNetError
from ifs import IFSModel, apply_word, words
from measure import BoundingBox, DiscreteMeasure
from .types import SampleNet

NetBuilder = Callable[[np.ndarray, float], SampleNet]


def point_net(centers, rho: float, label: str = "points") -> SampleNet:
    """给定中心的采样网"""
    return SampleNet(np.asarray(centers, dtype=float).reshape(len(centers), -1), rho, label=label)


def cylinder_net(ifs: IFSModel, depth: int, rho_factor: float,
                 frame: Optional[BoundingBox] = None) -> SampleNet:
    """
    深度 n 柱集中点构成的采样网

    中心为 S_w(包围盒中心)，半径 ρ = rho_factor · r_max^n · 包围盒最大边长。
    """
    frame = frame or ifs.bounding_box()
    center = (np.asarray(frame.lo) + np.asarray(frame.hi)) / 2.0
    centers = np.array([apply_word(ifs, w, center) for w in words(ifs, depth)])
    rho = rho_factor * float(ifs.ratios.max()) ** depth * float(frame.widths.max())
    return SampleNet(centers, rho, label=f"cylinders@{depth}")


def atom_net(measure: DiscreteMeasure, count: int, rho: float,
             within: Optional[tuple] = None) -> SampleNet:
    """
    在坐标字典序下等间隔抽取原子作为中心

    Args:
        measure: 测度 π
        count: 中心个数上限
        rho: 网半径
        within: (center, radius)，只在该开球内抽取
    """
    order = np.lexsort([measure.atoms[:, j] for j in reversed(range(measure.dim))])
    pts = measure.atoms[order]
    if within is not None:
        center, radius = within
        dist = np.linalg.norm(pts - np.asarray(center, dtype=float), axis=1)
        pts = pts[dist < radius]
    if len(pts) == 0:
        raise EmptyNetError(f"开球 {within} 内没有原子可作网点")
    picks = np.unique(np.round(np.linspace(0, len(pts) - 1, min(count, len(pts)))).astype(int))
    return SampleNet(pts[picks], rho, label=f"atoms×{len(picks)}")


def atom_net_builder(measure: DiscreteMeasure, count: int, rho: float) -> NetBuilder:
    """tau_loc_max 的内层网构造器：在外层球内等间隔取原子"""
    def build(center, radius: float) -> SampleNet:
        return atom_net(measure, count, rho, within=(center, radius))
    return build


def cylinder_net_builder(ifs: IFSModel, depth: int, rho_factor: float,
                         frame: Optional[BoundingBox] = None) -> NetBuilder:
    """tau_loc_max 的内层网构造器：外层球内的柱集中点"""
    net = cylinder_net(ifs, depth, rho_factor, frame)

    def build(center, radius: float) -> SampleNet:
        local = net.within(center, radius)
        if local is None:
            raise EmptyNetError(f"开球 ({center}, {radius}) 内没有深度 {depth} 的柱集中点")
        return local
    return build


def cylinder_representatives(ifs: IFSModel, depth: int) -> np.ndarray:
    """深度 n 柱集代表点 S_w(x_0)，x_0 为 S_1 的不动点"""
    x0 = ifs.maps[0].fixed_point()
    return np.array([apply_word(ifs, w, x0) for w in words(ifs, depth)])
