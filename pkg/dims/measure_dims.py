"""
DimLab - 多重分形盒维数实验室

测度的小/大多重分形盒维数

在选择层级的网格上观察 μ：候选集合 E 是网格单元（与 π 支撑相交部分）的并。
小维数取 μ-质量 ≥ ε₀ 的单元上的最小估计；
大维数先用两尺度局部指数丢弃指数最高的单元（保留质量 > 1-ε），再对保留区域整体估计。

μ 的重原子（单点质量 ≥ ε₀）本身也是候选集合 {a}：小维数在单元与重原子中取最小，
大维数在保留区域与质量 > 1-ε 的单个原子中取最小。
"""
import math
from dataclasses import dataclass, field
from typing import Optional

from config import config
from counting import SlopeEstimate
from errors import EmptyRegionError, MeasureError, ThresholdError
from logger import get_logger
from measure import BoundingBox, DiscreteMeasure, GridCell, Region, to_grid
from .exponents import upper_dim
from .types import ScaleConfig

logger = get_logger("dims")

WHICH = ("small", "big")
BOUNDS = ("lower", "upper")


@dataclass
class CellEstimate:
    cell: GridCell
    mass: float
    estimate: SlopeEstimate

    def headline(self, bound: str) -> float:
        return self.estimate.upper if bound == "upper" else self.estimate.lower

    @property
    def two_scale(self) -> float:
        """阶梯最后两个尺度上的斜率"""
        values = self.estimate.series.values
        base = self.estimate.series.base
        return math.log(values[-1] / values[-2]) / math.log(base)


@dataclass
class AtomEstimate:
    """μ 的单个重原子作为候选集合"""
    point: tuple
    mass: float
    estimate: SlopeEstimate

    def headline(self, bound: str) -> float:
        return self.estimate.upper if bound == "upper" else self.estimate.lower


@dataclass
class Selection:
    """一次小/大维数选择的结果；atom 非空时候选集合是该单点"""
    value: float
    estimate: SlopeEstimate
    cells: list = field(default_factory=list)
    retained_mass: float = 1.0
    atom: Optional[tuple] = None

    @property
    def label(self) -> str:
        if self.atom is not None:
            return f"atom={self.atom}"
        if len(self.cells) == 1:
            return f"cell={self.cells[0].index}"
        return f"cells={len(self.cells)}"


class MeasureDimsAnalysis:
    """
    同一 (μ, π, q) 下各 ε、各上下界共用的单元估计

    Args:
        mu: 被研究的测度 μ
        pi: 参考测度 π（维数在其上计算）
        q: 阶数
        cfg: 尺度配置；cfg.frame 为网格包围盒
        selection_level: 选择层级，默认取配置
        mass_threshold: 小维数的单元质量阈值 ε₀
    """

    def __init__(self, mu: DiscreteMeasure, pi: DiscreteMeasure, q: float, cfg: ScaleConfig,
                 selection_level: int = None, mass_threshold: float = None):
        if mu.dim != pi.dim:
            raise MeasureError(f"μ 与 π 维数不同: {mu.dim} / {pi.dim}")
        self.mu = mu
        self.pi = pi
        self.q = q
        self.cfg = cfg
        self.level = selection_level if selection_level is not None else \
            config.get("dims", "selection_level", default=2)
        self.threshold = mass_threshold if mass_threshold is not None else \
            config.get("dims", "mass_threshold", default=0.01)
        self.frame = cfg.frame or _joint_box(mu, pi)
        self._cells = None
        self._atoms = None

    @property
    def cells(self) -> list[CellEstimate]:
        """μ 有质量且与 π 支撑相交的单元，按下标排序"""
        if self._cells is None:
            grid = to_grid(self.mu, self.cfg.base, self.level, self.frame)
            cells = []
            for cell, mass in sorted(grid.cell_masses.items()):
                region = Region.from_cells([cell], self.frame)
                try:
                    estimate = upper_dim(self.pi, region, self.q, self.cfg)
                except EmptyRegionError:
                    logger.warning(f"单元 {cell.index} 带 μ 质量 {mass:.4g} 但不含 π 的原子，忽略")
                    continue
                cells.append(CellEstimate(cell, mass, estimate))
            self._cells = cells
            logger.debug(f"选择层级 {self.level}: {len(cells)} 个带质量单元")
        return self._cells

    @property
    def atoms(self) -> list[AtomEstimate]:
        """单点质量 ≥ ε₀ 且是 π 原子的 μ 原子，按坐标排序"""
        if self._atoms is None:
            atoms = []
            heavy = sorted((tuple(float(c) for c in a), float(w))
                           for a, w in zip(self.mu.atoms, self.mu.weights) if w >= self.threshold)
            for point, mass in heavy:
                try:
                    estimate = upper_dim(self.pi, Region.ball(point, 0.0), self.q, self.cfg)
                except EmptyRegionError:
                    logger.debug(f"μ 原子 {point} 不在 π 的支撑上，不作为单点候选")
                    continue
                atoms.append(AtomEstimate(point, mass, estimate))
            self._atoms = atoms
            logger.debug(f"重原子候选 {len(atoms)} 个")
        return self._atoms

    def _best_cell(self, bound: str) -> Optional[CellEstimate]:
        charged = [c for c in self.cells if c.mass >= self.threshold]
        if not charged:
            return None
        return min(charged, key=lambda c: (c.headline(bound), c.cell.index))

    def small(self, bound: str = "upper") -> Selection:
        """
        小维数：μ-质量 ≥ ε₀ 的单元与重原子上的最小估计

        同值时单元优先。

        Raises:
            ThresholdError: 没有单元或原子达到阈值
        """
        best_cell = self._best_cell(bound)
        best_atom = min(self.atoms, key=lambda a: (a.headline(bound), a.point), default=None)
        if best_cell is None and best_atom is None:
            raise ThresholdError(f"没有单元的 μ 质量达到阈值 {self.threshold}")
        if best_atom is not None and (best_cell is None
                                      or best_atom.headline(bound) < best_cell.headline(bound)):
            return Selection(best_atom.headline(bound), best_atom.estimate, [], best_atom.mass,
                             atom=best_atom.point)
        return Selection(best_cell.headline(bound), best_cell.estimate, [best_cell.cell], best_cell.mass)

    def big(self, eps: float, bound: str = "upper") -> Selection:
        """
        大维数：丢弃两尺度指数最高的单元，直到再丢就会使保留质量 ≤ 1-ε

        小维数的最优单元始终保留；保留区域是它的超集，
        而盒维数对包含关系单调，故结果不低于小维数。
        单个原子质量 > 1-ε 时 {a} 也是候选，取两者中较小的估计。
        """
        if not 0.0 < eps < 1.0:
            raise MeasureError(f"ε 必须在 (0,1) 内: {eps}")
        floor = self.small(bound).value
        best_cell = self._best_cell(bound)
        protected = best_cell.cell if best_cell is not None else None
        retained = list(self.cells)
        mass = math.fsum(c.mass for c in retained)
        for c in sorted(self.cells, key=lambda c: (-c.two_scale, c.cell.index)):
            if c.cell == protected:
                continue
            if mass - c.mass > 1.0 - eps:
                retained.remove(c)
                mass -= c.mass
        region = Region.from_cells([c.cell for c in retained], self.frame)
        estimate = upper_dim(self.pi, region, self.q, self.cfg)
        selection = Selection(estimate.upper if bound == "upper" else estimate.lower,
                              estimate, [c.cell for c in retained], mass)

        dominant = [a for a in self.atoms if a.mass > 1.0 - eps]
        if dominant:
            atom = min(dominant, key=lambda a: (a.headline(bound), a.point))
            if atom.headline(bound) < selection.value:
                selection = Selection(atom.headline(bound), atom.estimate, [], atom.mass, atom=atom.point)

        if selection.value < floor:
            logger.debug(f"大维数估计 {selection.value:.4f} 低于小维数 {floor:.4f}，按包含单调性取后者")
            selection.value = floor
        return selection


def _joint_box(mu: DiscreteMeasure, pi: DiscreteMeasure) -> BoundingBox:
    lo = [min(a, b) for a, b in zip(mu.bounding_box().lo, pi.bounding_box().lo)]
    hi = [max(a, b) for a, b in zip(mu.bounding_box().hi, pi.bounding_box().hi)]
    return BoundingBox(tuple(lo), tuple(hi))


def measure_dims(mu: DiscreteMeasure, pi: DiscreteMeasure, q: float, eps: float,
                 which: str, bound: str, cfg: ScaleConfig,
                 selection_level: int = None, mass_threshold: float = None) -> float:
    """
    测度 μ 的小/大、下/上多重分形盒维数估计

    Args:
        mu: 测度 μ
        pi: 参考测度 π
        q: 阶数
        eps: 大维数的 ε（小维数忽略）
        which: "small" 或 "big"
        bound: "lower" 或 "upper"
        cfg: 尺度配置

    Returns:
        有限样本估计
    """
    if which not in WHICH or bound not in BOUNDS:
        raise MeasureError(f"未知组合: which={which}, bound={bound}")
    analysis = MeasureDimsAnalysis(mu, pi, q, cfg, selection_level, mass_threshold)
    selection = analysis.small(bound) if which == "small" else analysis.big(eps, bound)
    return selection.value


def big_dim_trend(analysis: MeasureDimsAnalysis, eps_ladder=None, bound: str = "upper") -> list:
    """ε 阶梯上的大维数趋势 [(ε, 值), ...]，ε 从大到小"""
    ladder = eps_ladder or config.get("dims", "eps_ladder", default=[0.5, 0.2, 0.1, 0.05])
    return [(eps, analysis.big(eps, bound).value) for eps in sorted(ladder, reverse=True)]
