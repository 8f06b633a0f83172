"""
DimLab - 多重分形盒维数实验室

开集条件 (OSC) 检查
"""
from dataclasses import dataclass, field

import numpy as np

from config import config
from logger import get_logger
from measure import BoundingBox
from .model import IFSModel

logger = get_logger("ifs")


@dataclass
class OSCReport:
    """开集条件检查结果"""
    holds: bool
    exact: bool                                     # 所有映射都是带符号置换时为精确盒算术
    violations: list = field(default_factory=list)  # (类型, m, l) 元组，映射编号从 1 开始

    @property
    def summary(self) -> str:
        if self.holds:
            return "OSC 成立" + ("" if self.exact else "（保守检查）")
        return f"OSC 未通过: {len(self.violations)} 处违例"


def _image_box(sim, lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """盒子角点像的包围盒；带符号置换时即为精确像"""
    d = len(lo)
    corners = np.array([[hi[j] if (mask >> j) & 1 else lo[j] for j in range(d)]
                        for mask in range(2 ** d)])
    image = sim.apply(corners)
    return image.min(axis=0), image.max(axis=0)


def verify_osc(ifs: IFSModel, box: BoundingBox) -> OSCReport:
    """
    检查开盒 U 满足 S_m(U) ⊂ U 且 S_m(U) ∩ S_l(U) = ∅

    非带符号置换的正交部分使用像的包围盒，只有保守检查通过才报告成立。

    Args:
        ifs: 迭代函数系统
        box: 开盒 U

    Returns:
        OSCReport
    """
    tol = config.get("ifs", "osc_tolerance", default=1e-12)
    lo, hi = np.asarray(box.lo), np.asarray(box.hi)
    exact = all(m.is_signed_permutation for m in ifs.maps)
    images = [_image_box(m, lo, hi) for m in ifs.maps]
    violations = []

    for i, (img_lo, img_hi) in enumerate(images, 1):
        if np.any(img_lo < lo - tol) or np.any(img_hi > hi + tol):
            violations.append(("containment", i, i))

    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            (a_lo, a_hi), (b_lo, b_hi) = images[i], images[j]
            separated = np.any((a_hi <= b_lo + tol) | (b_hi <= a_lo + tol))
            if not separated:
                violations.append(("overlap", i + 1, j + 1))

    report = OSCReport(holds=not violations, exact=exact, violations=violations)
    logger.debug(f"OSC 检查: {report.summary}, 违例={violations}")
    return report
