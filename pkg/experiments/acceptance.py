"""
DimLab - 多重分形盒维数实验室

验收检查 - verify 子命令

每项检查产出若干 CheckResult；任一失败时 verify 以状态 1 退出。
原子分辨率保护不通过时不再运行其余检查。
"""
import filecmp
import math
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from config import config
from counting import covering_sum, grid_moment_sum
from dims import DimReport, d_unif, tau
from errors import DimLabError, ResolutionGuardError, ScanExhaustedError
from export import CsvExporter
from logger import get_logger
from measure import DiscreteMeasure, Region
from metric import enlargement_check, fortet_mourier
from typgen import verify_radius_condition, weighted_packing_measure
from .run_config import Session, build_session
from .runner import compute_reports, load_run

logger = get_logger("experiments")

SUM_RTOL = 1e-9
METRIC_TOL = 1e-8


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _tol(name: str) -> float:
    return float(config.get("tolerances", name))


def _within(value: Optional[float], target: float, tol: float) -> bool:
    return value is not None and abs(value - target) <= tol


def _random_measure(rng: np.random.Generator, max_atoms: int = 10) -> DiscreteMeasure:
    n = int(rng.integers(1, max_atoms + 1))
    atoms = np.unique(np.round(rng.random(n), 6))
    weights = rng.dirichlet(np.ones(len(atoms)))
    weights = weights / weights.sum()
    return DiscreteMeasure(atoms=atoms.reshape(-1, 1), weights=weights)


def _perturbed(rng: np.random.Generator, mu: DiscreteMeasure, size: float) -> DiscreteMeasure:
    atoms = np.clip(mu.atoms[:, 0] + rng.uniform(-size, size, mu.size), 0.0, 1.0)
    atoms, inverse = np.unique(np.round(atoms, 6), return_inverse=True)
    weights = np.zeros(len(atoms))
    np.add.at(weights, np.asarray(inverse).reshape(-1), mu.weights * rng.uniform(0.8, 1.2, mu.size))
    return DiscreteMeasure(atoms=atoms.reshape(-1, 1), weights=weights / weights.sum())


class AcceptanceSuite:
    """
    对一个会话运行验收检查

    Args:
        session: 已构建的会话
        reports: q 网格上的报告，None 时按需计算
    """

    def __init__(self, session: Session, reports: Optional[list[DimReport]] = None):
        self.session = session
        self._reports = reports
        self.checks: dict[str, Callable[[], list[CheckResult]]] = {
            "guard": self.check_guard,
            "expectations": self.check_expectations,
            "unif_vs_s_extremes": self.check_unif,
            "sandwich": self.check_sandwich,
            "tau_shape": self.check_tau_shape,
            "mode_agreement": self.check_modes,
            "variant_agreement": self.check_variants,
            "grid_oracle": self.check_grid_oracle,
            "measure_dims_order": self.check_small_big,
            "metric_suite": self.check_metric,
            "typgen_certificate": self.check_typgen,
            "determinism": self.check_determinism,
        }

    @property
    def reports(self) -> list[DimReport]:
        if self._reports is None:
            self._reports = compute_reports(self.session)
        return self._reports

    @property
    def has_reports(self) -> bool:
        return self._reports is not None

    def default_checks(self) -> list[str]:
        names = ["guard", "expectations", "tau_shape", "measure_dims_order", "determinism"]
        if self.session.s_extremes is not None:
            names += ["unif_vs_s_extremes", "sandwich", "grid_oracle", "variant_agreement"]
        return names

    def run(self, names: Optional[list[str]] = None) -> list[CheckResult]:
        names = list(names or self.default_checks())
        if "guard" not in names:
            names.insert(0, "guard")
        results = []
        for name in names:
            if name not in self.checks:
                results.append(CheckResult(name, False, "未知检查"))
                continue
            try:
                batch = self.checks[name]()
            except DimLabError as e:
                logger.error(f"检查 {name} 异常: {e}")
                batch = [CheckResult(name, False, f"{type(e).__name__}: {e}")]
            for r in batch:
                (logger.info if r.passed else logger.error)(
                    f"[{'通过' if r.passed else '失败'}] {r.name}: {r.detail}")
            results.extend(batch)
            if name == "guard" and not all(r.passed for r in batch):
                logger.error("原子分辨率保护未通过，跳过其余检查")
                break
        return results

    # ------------------------------------------------------------------

    def check_guard(self) -> list[CheckResult]:
        try:
            self.session.require_resolution()
        except ResolutionGuardError as e:
            return [CheckResult("guard", False, str(e))]
        return [CheckResult("guard", True, "窗口在构建深度的分辨范围内")]

    def _target(self, target) -> float:
        if isinstance(target, str):
            extremes = self.session.s_extremes
            if extremes is None or target not in ("s_min", "s_max"):
                raise DimLabError(f"无法解析期望值 {target}（需要 OSC 成立的自相似输入）")
            return extremes[0] if target == "s_min" else extremes[1]
        return float(target)

    def check_expectations(self) -> list[CheckResult]:
        results = []
        for quantity, per_q in self.session.run.expect.items():
            for key, (target, tol) in per_q.items():
                goal = self._target(target)
                for report in self.reports:
                    if key != "*" and float(key) != report.q:
                        continue
                    value = report.value(quantity)
                    results.append(CheckResult(
                        f"expect:{quantity}@q={report.q:g}",
                        _within(value, goal, float(tol)),
                        f"估计 {value}，期望 {goal:.6g} ± {tol}",
                    ))
        if not results:
            results.append(CheckResult("expectations", True, "未配置期望值"))
        return results

    def check_unif(self) -> list[CheckResult]:
        extremes = self.session.s_extremes
        if extremes is None:
            return [CheckResult("unif_vs_s_extremes", False, "需要 OSC 成立的自相似输入")]
        s_min, s_max = extremes
        tol = _tol("unif")
        report = self.reports[0]
        targets = {
            "D_unif_minus": s_max, "D_unif_max_minus": s_max, "D_max_minus": s_max,
            "D_unif_plus": s_min, "D_unif_min_plus": s_min, "D_min_plus": s_min,
        }
        return [CheckResult(f"unif:{name}", _within(report.value(name), goal, tol),
                            f"估计 {report.value(name)}，目标 {goal:.6g} ± {tol}")
                for name, goal in targets.items()]

    def check_sandwich(self) -> list[CheckResult]:
        extremes = self.session.s_extremes
        if extremes is None:
            return [CheckResult("sandwich", False, "需要 OSC 成立的自相似输入")]
        s_min, s_max = extremes
        tol = _tol("sandwich")
        report = self.reports[0]
        plus, minus = report.value("D_plus"), report.value("D_minus")
        ok = (plus is not None and minus is not None
              and s_min - tol <= plus <= minus <= s_max + tol)
        return [CheckResult("sandwich", ok,
                            f"s_min={s_min:.4f} D_plus={plus} D_minus={minus} s_max={s_max:.4f}")]

    def check_tau_shape(self) -> list[CheckResult]:
        points = sorted((r.q, r.value("tau")) for r in self.reports)
        if any(v is None for _, v in points):
            return [CheckResult("tau_shape", False, "存在失败的 τ 估计")]
        step, convexity = _tol("tau_step"), _tol("convexity")
        results = []
        for (qa, ta), (qb, tb) in zip(points, points[1:]):
            results.append(CheckResult(f"tau_monotone@{qa:g}->{qb:g}", tb <= ta + step,
                                       f"τ({qa:g})={ta:.4f}, τ({qb:g})={tb:.4f}"))
        for (qa, ta), (qb, tb), (qc, tc) in zip(points, points[1:], points[2:]):
            if not math.isclose(qb - qa, qc - qb):
                continue
            results.append(CheckResult(f"tau_convex@{qb:g}", tb <= (ta + tc) / 2.0 + convexity,
                                       f"τ({qb:g})={tb:.4f}, 端点均值={(ta + tc) / 2.0:.4f}"))
        return results

    def check_modes(self) -> list[CheckResult]:
        pi, cfg = self.session.pi, self.session.cfg
        tol = _tol("mode")
        covering = self.session.with_cfg(mode="covering").cfg
        packing1 = self.session.with_cfg(mode="packing", dilation=1.0).cfg
        packing2 = self.session.with_cfg(mode="packing", dilation=2.0).cfg
        results = []
        for q in (-1.0, 0.0, 1.0):
            t_cov = tau(pi, q, covering).upper
            t_p1 = tau(pi, q, packing1).upper
            t_p2 = tau(pi, q, packing2).upper
            results.append(CheckResult(f"mode:covering~packing@q={q:g}", abs(t_cov - t_p1) <= tol,
                                       f"覆盖 {t_cov:.4f}，填充 {t_p1:.4f}"))
            results.append(CheckResult(f"mode:c=1~c=2@q={q:g}", abs(t_p1 - t_p2) <= tol,
                                       f"c=1 {t_p1:.4f}，c=2 {t_p2:.4f}"))
        logger.debug(f"模式比较使用窗口 k∈[{cfg.k_lo},{cfg.k_hi}]")
        return results

    def check_variants(self) -> list[CheckResult]:
        session = self.session
        nets = session.report_inputs().nets
        if not nets:
            return [CheckResult("variant_agreement", False, "未配置采样网")]
        tol = _tol("variant")
        centers = session.with_cfg(variant="centers").cfg
        intersecting = session.with_cfg(variant="intersecting").cfg
        results = []
        for sign in ("minus", "plus"):
            a = d_unif(session.pi, nets, centers, sign)
            b = d_unif(session.pi, nets, intersecting, sign)
            results.append(CheckResult(f"variant:D_unif_{sign}", abs(a - b) <= tol,
                                       f"centers {a:.4f}，intersecting {b:.4f}"))
        return results

    def check_grid_oracle(self) -> list[CheckResult]:
        pi, cfg, frame = self.session.pi, self.session.cfg, self.session.frame
        region = Region.enclosing(pi)
        results = []
        for q in self.session.run.qs:
            worst, detail = 0.0, ""
            for k in cfg.ks:
                exact = grid_moment_sum(pi, cfg.base, k, q, frame)
                greedy = covering_sum(pi, region, cfg.radius(k), q, order=cfg.order)
                gap = abs(exact - greedy) / abs(exact)
                if gap >= worst:
                    worst, detail = gap, f"k={k}: 网格 {exact!r}，覆盖 {greedy!r}"
            results.append(CheckResult(f"grid_oracle@q={q:g}", worst <= SUM_RTOL,
                                       f"最大相对差 {worst:.3g}（{detail}）"))
        return results

    def check_small_big(self) -> list[CheckResult]:
        results = []
        for report in self.reports:
            for bound in ("lower", "upper"):
                small, big = report.value(f"small_{bound}"), report.value(f"big_{bound}")
                if small is None or big is None:
                    continue
                results.append(CheckResult(f"small<=big_{bound}@q={report.q:g}", small <= big + 1e-12,
                                           f"small {small:.4f}，big {big:.4f}"))
        if not results:
            results.append(CheckResult("measure_dims_order", True, "未配置 μ"))
        return results

    def check_metric(self, trials: int = 1000, triples: int = 200) -> list[CheckResult]:
        """扩张界的随机试验与度量公理"""
        rng = np.random.default_rng(self.session.run.seed)
        applicable = violations = 0
        for i in range(trials):
            mu = _random_measure(rng)
            nu = _perturbed(rng, mu, 0.05) if i % 2 else _random_measure(rng)
            alpha, beta = rng.uniform(0.05, 0.5), rng.uniform(0.1, 1.0)
            a, b = np.sort(rng.random(2))
            region = Region.ball(((a + b) / 2.0,), max((b - a) / 2.0, 1e-6))
            report = enlargement_check(mu, nu, region, alpha, beta)
            applicable += report.applicable
            violations += not report.holds
        results = [CheckResult("metric:enlargement", violations == 0,
                               f"{trials} 次试验，适用 {applicable} 次，违例 {violations} 次")]

        worst_sym = worst_tri = worst_id = worst_shift = 0.0
        bound_ok = True
        for _ in range(triples):
            mu, nu, rho = (_random_measure(rng) for _ in range(3))
            d_mn = fortet_mourier(mu, nu)[0]
            d_nm = fortet_mourier(nu, mu)[0]
            d_mr = fortet_mourier(mu, rho)[0]
            d_nr = fortet_mourier(nu, rho)[0]
            worst_sym = max(worst_sym, abs(d_mn - d_nm))
            worst_tri = max(worst_tri, d_mr - d_mn - d_nr)
            worst_id = max(worst_id, fortet_mourier(mu, mu)[0])
            shifted = [DiscreteMeasure(atoms=m.atoms + 0.37, weights=m.weights) for m in (mu, nu)]
            worst_shift = max(worst_shift, abs(fortet_mourier(*shifted)[0] - d_mn))
            bound_ok &= d_mn <= 2.0 + METRIC_TOL
        results += [
            CheckResult("metric:symmetry", worst_sym <= METRIC_TOL, f"最大偏差 {worst_sym:.3g}"),
            CheckResult("metric:triangle", worst_tri <= METRIC_TOL, f"最大超出 {worst_tri:.3g}"),
            CheckResult("metric:identity", worst_id <= METRIC_TOL, f"L(μ,μ) 最大 {worst_id:.3g}"),
            CheckResult("metric:translation", worst_shift <= METRIC_TOL, f"最大偏差 {worst_shift:.3g}"),
            CheckResult("metric:bound", bool(bound_ok), "L ≤ 2"),
        ]
        return results

    def check_typgen(self) -> list[CheckResult]:
        """加权填充测度：t 可达时构造并复核，t 不可达时扫描应耗尽"""
        session = self.session
        opts = (session.run.typgen or {}).get("certificate", {})
        x = opts.get("x", session.pi.atoms[0].tolist())
        s, q = float(opts.get("s", 1.0)), float(opts.get("q", 0.0))
        t_ok, t_bad = float(opts.get("t_reachable", 0.5)), float(opts.get("t_unreachable", 0.7))
        base = session.cfg.base

        wpm = weighted_packing_measure(session.pi, x, s, q, t_ok, base=base)
        verified = verify_radius_condition(session.pi, wpm)
        results = [CheckResult(f"typgen:t={t_ok:g}", verified,
                               f"r_xs={wpm.radius:.6g}，中心 {len(wpm.centers)} 个，复核{'通过' if verified else '失败'}")]
        try:
            wpm = weighted_packing_measure(session.pi, x, s, q, t_bad, base=base)
            results.append(CheckResult(f"typgen:t={t_bad:g}", False, f"意外成功: r_xs={wpm.radius:.6g}"))
        except ScanExhaustedError as e:
            results.append(CheckResult(f"typgen:t={t_bad:g}", True, str(e)))
        return results

    def check_determinism(self) -> list[CheckResult]:
        """两次独立计算写出的 CSV 逐字节相同"""
        session = build_session(self.session.run)
        with tempfile.TemporaryDirectory() as tmp:
            first, second = Path(tmp) / "a", Path(tmp) / "b"
            CsvExporter(first).write_report(self.reports)
            CsvExporter(second).write_report(compute_reports(session))
            names = sorted(str(p.relative_to(first)) for p in first.rglob("*.csv"))
            _, mismatch, errors = filecmp.cmpfiles(first, second, names, shallow=False)
        ok = not mismatch and not errors
        return [CheckResult("determinism", ok,
                            f"{len(names)} 个文件" + ("一致" if ok else f"，不一致: {mismatch + errors}"))]


def cmd_verify(args) -> int:
    """运行验收检查，写出 checks.csv，任一失败返回 1"""
    run = load_run(args)
    session = build_session(run)
    suite = AcceptanceSuite(session)
    results = suite.run(run.checks)
    exporter = CsvExporter(run.out_dir)
    if suite.has_reports:
        exporter.write_report(suite.reports)
    path = exporter.write_checks(results)

    failed = [r for r in results if not r.passed]
    print(f"验收 {run.name}: 通过 {len(results) - len(failed)}/{len(results)}，结果 {path}")
    for r in failed:
        print(f"  失败 {r.name}: {r.detail}")
    return 1 if failed else 0
