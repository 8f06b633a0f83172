"""
DimLab - 多重分形盒维数实验室

Fortet-Mourier（有界 Lipschitz）距离

对有限支撑测度，L(μ,ν) = sup ∫f dμ - ∫f dν，f 取遍 |f| ≤ 1、Lip(f) ≤ 1 的函数，
等价于合并支撑上的有限线性规划：
    max Σ f(z)(μ{z} - ν{z})
    s.t. -1 ≤ f(z) ≤ 1,  f(z) - f(w) ≤ ‖z - w‖
有限点集上满足约束的函数可延拓到整个空间（McShane 延拓后截断到 [-1,1]），
所以有限规划的最优值就是上确界。
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix
from scipy.spatial.distance import cdist

from config import config
from errors import MeasureError, MetricCapError, WitnessError
from logger import get_logger
from measure import DiscreteMeasure, Region, enlarge, region_mass

logger = get_logger("metric")


@dataclass(frozen=True, eq=False)
class LipschitzWitness:
    """合并支撑上的最优函数值"""
    points: np.ndarray
    values: np.ndarray

    def violation(self) -> float:
        """两类约束的最大违反量"""
        bound = float(np.max(np.abs(self.values)) - 1.0)
        dist = cdist(self.points, self.points)
        lip = float(np.max(self.values[:, None] - self.values[None, :] - dist))
        return max(bound, lip, 0.0)


def _union_support(mu: DiscreteMeasure, nu: DiscreteMeasure) -> tuple[np.ndarray, np.ndarray]:
    """合并支撑与带符号权重 μ{z} - ν{z}，保持首次出现顺序"""
    atoms = np.concatenate([mu.atoms, nu.atoms], axis=0)
    signed = np.concatenate([mu.weights, -nu.weights])
    _, first, inverse = np.unique(atoms, axis=0, return_index=True, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    coeff = np.zeros(len(order))
    np.add.at(coeff, rank[inverse], signed)
    return atoms[first[order]], coeff


def fortet_mourier(mu: DiscreteMeasure, nu: DiscreteMeasure, cap: int = None,
                   tol: float = None) -> tuple[float, LipschitzWitness]:
    """
    精确 Fortet-Mourier 距离

    Args:
        mu: 测度 μ
        nu: 测度 ν
        cap: 合并支撑上限，默认 400
        tol: 见证复核容差，默认 1e-8

    Returns:
        (距离, 见证函数)

    Raises:
        MetricCapError: 合并支撑超过上限
        WitnessError: 求解失败或见证未通过复核
    """
    cap = cap or config.get("metric", "atom_cap", default=400)
    tol = tol or config.get("metric", "lp_tolerance", default=1e-8)
    if mu.dim != nu.dim:
        raise WitnessError(f"维数不同: {mu.dim} / {nu.dim}")

    points, coeff = _union_support(mu, nu)
    n = len(points)
    if n > cap:
        raise MetricCapError(f"合并支撑 {n} 个原子，超过上限 {cap}")

    dist = cdist(points, points)
    # 距离 ≥ 2 的约束已由 |f| ≤ 1 蕴含
    rows_i, rows_j = np.nonzero((dist < 2.0) & ~np.eye(n, dtype=bool))
    m = len(rows_i)
    a_ub = coo_matrix(
        (np.concatenate([np.ones(m), -np.ones(m)]),
         (np.concatenate([np.arange(m), np.arange(m)]), np.concatenate([rows_i, rows_j]))),
        shape=(m, n),
    ).tocsr()
    b_ub = dist[rows_i, rows_j]

    res = linprog(
        -coeff,
        A_ub=a_ub if m else None,
        b_ub=b_ub if m else None,
        bounds=[(-1.0, 1.0)] * n,
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        raise WitnessError(f"线性规划求解失败: {res.message}")

    values = np.clip(np.asarray(res.x, dtype=float), -1.0, 1.0)
    witness = LipschitzWitness(points=points, values=values)
    violation = witness.violation()
    distance = max(0.0, math.fsum(coeff * values))
    if violation > tol or abs(distance - max(0.0, -res.fun)) > tol:
        raise WitnessError(f"见证复核失败: 违反量={violation:.3g}, 目标差={abs(distance + res.fun):.3g}")

    logger.debug(f"Fortet-Mourier: n={n}, 约束={m}, L={distance:.10g}")
    return distance, witness


@dataclass
class EnlargementReport:
    """L(μ,ν) < η = αβ ⟹ μ(E) ≤ ν(E(α)) + β 的检查结果"""
    distance: float
    eta: float
    applicable: bool
    holds: bool
    lhs: float = 0.0
    rhs: float = 0.0

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


def enlargement_check(mu: DiscreteMeasure, nu: DiscreteMeasure, region: Region,
                      alpha: float, beta: float) -> EnlargementReport:
    """
    扩张界检查

    L ≥ αβ 时不适用（holds 视为真）；否则比较 μ(E) 与 ν(E(α)) + β。
    """
    if alpha <= 0 or beta <= 0:
        raise MeasureError(f"α、β 必须为正: {alpha}, {beta}")
    distance, _ = fortet_mourier(mu, nu)
    eta = alpha * beta
    if distance >= eta:
        return EnlargementReport(distance=distance, eta=eta, applicable=False, holds=True)
    lhs = region_mass(mu, region)
    rhs = region_mass(nu, enlarge(region, alpha)) + beta
    holds = lhs <= rhs + 1e-12
    if not holds:
        logger.warning(f"扩张界不成立: μ(E)={lhs}, ν(E(α))+β={rhs}, L={distance}, η={eta}")
    return EnlargementReport(distance=distance, eta=eta, applicable=True, holds=holds, lhs=lhs, rhs=rhs)
