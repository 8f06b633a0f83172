"""
DimLab - 多重分形盒维数实验室

维数估计的数据类型
"""
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np

from config import config
from counting import SlopeEstimate
from errors import ConfigError, EmptyNetError
from measure import BoundingBox

MODES = ("covering", "packing")
VARIANTS = ("centers", "intersecting")


@dataclass(frozen=True)
class ScaleConfig:
    """
    尺度窗口与求和方式

    mode 决定用覆盖和还是填充和；dilation 为填充和的膨胀因子 c；
    variant 决定 D 指数的局部化方式（球心在球内 / 球相交）。
    """
    base: int = 3
    k_lo: int = 3
    k_hi: int = 8
    mode: str = "covering"
    dilation: float = 1.0
    order: str = "mass"
    variant: str = "centers"
    frame: Optional[BoundingBox] = None

    def __post_init__(self):
        if self.base < 2:
            raise ConfigError(f"网格进制必须 ≥ 2: {self.base}")
        if self.k_lo >= self.k_hi:
            raise ConfigError(f"需要 k_lo < k_hi: {self.k_lo}, {self.k_hi}")
        if self.mode not in MODES:
            raise ConfigError(f"未知求和方式: {self.mode}")
        if self.variant not in VARIANTS:
            raise ConfigError(f"未知 D 指数变体: {self.variant}")
        if self.dilation <= 0:
            raise ConfigError(f"膨胀因子必须为正: {self.dilation}")

    @classmethod
    def from_config(cls, **overrides) -> "ScaleConfig":
        """以全局配置为默认值"""
        values = dict(
            base=config.get("grid", "base", default=3),
            k_lo=config.get("ladder", "k_lo", default=3),
            k_hi=config.get("ladder", "k_hi", default=8),
            order=config.get("counting", "order", default="mass"),
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @property
    def ks(self) -> range:
        return range(self.k_lo, self.k_hi + 1)

    def radius(self, k: int) -> float:
        return float(self.base) ** -k


@dataclass(frozen=True, eq=False)
class SampleNet:
    """有限中心网 y_1..y_N 与共同半径 ρ"""
    centers: np.ndarray
    rho: float
    label: str = ""

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        if centers.size == 0:
            raise EmptyNetError(f"采样网 {self.label} 为空")
        if self.rho <= 0:
            raise ConfigError(f"采样网半径必须为正: {self.rho}")
        centers.setflags(write=False)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "rho", float(self.rho))

    @property
    def N(self) -> int:
        return self.centers.shape[0]

    def within(self, center, radius: float) -> Optional["SampleNet"]:
        """保留落在开球 B(center, radius) 内的中心，没有则返回 None"""
        dist = np.linalg.norm(self.centers - np.asarray(center, dtype=float), axis=1)
        keep = dist < radius
        if not np.any(keep):
            return None
        return SampleNet(self.centers[keep], self.rho, label=f"{self.label}|局部")


@dataclass
class ReportEntry:
    """报告中的一个量：取值、斜率来源或错误信息"""
    value: Optional[float] = None
    estimate: Optional[SlopeEstimate] = None
    error: Optional[str] = None
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.error is None and self.value is not None


@dataclass
class DimReport:
    """一个 (π, μ, q) 配置下的全部指数估计"""
    q: float
    mode: str = "covering"
    variant: str = "centers"
    tau: Optional[ReportEntry] = None
    tau_loc: Optional[ReportEntry] = None
    tau_loc_max: Optional[ReportEntry] = None
    D_minus: Optional[ReportEntry] = None
    D_plus: Optional[ReportEntry] = None
    D_unif_minus: Optional[ReportEntry] = None
    D_unif_plus: Optional[ReportEntry] = None
    D_unif_max_minus: Optional[ReportEntry] = None
    D_max_minus: Optional[ReportEntry] = None
    D_unif_min_plus: Optional[ReportEntry] = None
    D_min_plus: Optional[ReportEntry] = None
    small_lower: Optional[ReportEntry] = None
    small_upper: Optional[ReportEntry] = None
    big_lower: Optional[ReportEntry] = None
    big_upper: Optional[ReportEntry] = None
    extras: dict = field(default_factory=dict)

    QUANTITIES = (
        "tau", "tau_loc", "tau_loc_max",
        "D_minus", "D_plus", "D_unif_minus", "D_unif_plus",
        "D_unif_max_minus", "D_max_minus", "D_unif_min_plus", "D_min_plus",
        "small_lower", "small_upper", "big_lower", "big_upper",
    )

    def entries(self):
        """按固定顺序产出 (名称, ReportEntry)，先标准量后附加量"""
        for name in self.QUANTITIES:
            entry = getattr(self, name)
            if entry is not None:
                yield name, entry
        for name in sorted(self.extras):
            yield name, self.extras[name]

    def value(self, name: str) -> Optional[float]:
        entry = getattr(self, name, None) if name in self.QUANTITIES else self.extras.get(name)
        return entry.value if entry is not None and entry.ok else None

    def set(self, name: str, entry: ReportEntry) -> None:
        if name in self.QUANTITIES:
            setattr(self, name, entry)
        else:
            self.extras[name] = entry
