"""
DimLab - 多重分形盒维数实验室

报告组装 - 对一个 q 计算全部指数，单个量失败只记录到该行
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from config import config
from errors import DimLabError
from logger import get_logger
from measure import DiscreteMeasure
from .exponents import (
    Extremum, d_extremes, d_unif_detail, d_unif_max_min_detail, doubling_detail,
    tau, tau_loc_detail, tau_loc_max_detail,
)
from .measure_dims import MeasureDimsAnalysis
from .typical import typical_predictions
from .types import DimReport, ReportEntry, SampleNet, ScaleConfig

logger = get_logger("dims")


@dataclass
class ReportInputs:
    """一次报告所需的全部输入"""
    pi: DiscreteMeasure
    cfg: ScaleConfig
    nets: list = field(default_factory=list)
    outer_net: Optional[SampleNet] = None
    inner_nets: list = field(default_factory=list)
    inner_builder: Optional[Callable] = None
    doubling_sample: Optional[np.ndarray] = None
    mu: Optional[DiscreteMeasure] = None
    selection_level: Optional[int] = None
    mass_threshold: Optional[float] = None
    eps_ladder: Optional[list] = None
    s_extremes: Optional[tuple] = None


def _guarded(name: str, fn: Callable[[], ReportEntry]) -> ReportEntry:
    try:
        return fn()
    except DimLabError as e:
        logger.error(f"{name} 计算失败: {e}")
        return ReportEntry(error=f"{type(e).__name__}: {e}")


def _from_extremum(ext: Extremum) -> ReportEntry:
    return ReportEntry(value=ext.value, estimate=ext.estimate)


class ReportBuilder:
    """
    报告构建器

    与 q 无关的 D 指数与倍增诊断只算一次（common），
    各 q 的量由 for_q 计算，可在线程池中并行调用。
    """

    def __init__(self, inputs: ReportInputs):
        self.inputs = inputs
        self._common = None

    def common(self) -> dict:
        """与 q 无关的量，首次调用时计算"""
        if self._common is not None:
            return self._common
        inp = self.inputs
        pi, cfg = inp.pi, inp.cfg
        common = {}

        def extremes():
            minus, plus = d_extremes(pi, cfg, cfg.variant)
            common["D_minus"] = ReportEntry(value=minus.upper, estimate=minus)
            common["D_plus"] = ReportEntry(value=plus.lower, estimate=plus)
            return common["D_minus"]

        err = _guarded("D_extremes", extremes)
        if err.error:
            common["D_minus"] = common["D_plus"] = err

        if inp.nets:
            common["D_unif_minus"] = _guarded(
                "D_unif_minus", lambda: _from_extremum(d_unif_detail(pi, inp.nets, cfg, "minus")))
            common["D_unif_plus"] = _guarded(
                "D_unif_plus", lambda: _from_extremum(d_unif_detail(pi, inp.nets, cfg, "plus")))

        if inp.outer_net is not None and inp.inner_nets:
            def four():
                result = d_unif_max_min_detail(pi, inp.outer_net, inp.inner_nets, cfg)
                for name, ext in result.items():
                    common[name] = _from_extremum(ext)
                return common["D_max_minus"]
            err = _guarded("D_unif_max_min", four)
            if err.error:
                for name in ("D_unif_max_minus", "D_max_minus", "D_unif_min_plus", "D_min_plus"):
                    common[name] = err

        if inp.doubling_sample is not None:
            def doubling():
                result = doubling_detail(pi, inp.doubling_sample, cfg)
                return ReportEntry(value=result.max_ratio,
                                   note=f"evaluated={result.evaluated}, skipped={result.skipped}")
            common["doubling_ratio"] = _guarded("doubling_ratio", doubling)

        self._common = common
        return common

    @property
    def doubling_ok(self) -> Optional[bool]:
        entry = self.common().get("doubling_ratio")
        if entry is None or not entry.ok:
            return None
        return entry.value <= config.get("dims", "doubling_bound", default=64.0)

    def for_q(self, q: float) -> DimReport:
        """计算一个 q 的完整报告"""
        inp = self.inputs
        pi, cfg = inp.pi, inp.cfg
        report = DimReport(q=q, mode=cfg.mode, variant=cfg.variant)

        def tau_entry():
            estimate = tau(pi, q, cfg)
            return ReportEntry(value=estimate.upper, estimate=estimate)
        report.tau = _guarded(f"tau(q={q})", tau_entry)

        if inp.nets:
            def tau_loc_entry():
                best = min((tau_loc_detail(pi, q, net, cfg) for net in inp.nets),
                           key=lambda e: e.value)
                return _from_extremum(best)
            report.tau_loc = _guarded(f"tau_loc(q={q})", tau_loc_entry)

        if inp.outer_net is not None and inp.inner_builder is not None:
            report.tau_loc_max = _guarded(
                f"tau_loc_max(q={q})",
                lambda: _from_extremum(tau_loc_max_detail(pi, q, inp.outer_net, inp.inner_builder, cfg)))

        for name, entry in self.common().items():
            report.set(name, entry)

        if inp.mu is not None:
            self._measure_dims(report, q)

        for name, entry in typical_predictions(report, self.doubling_ok, inp.s_extremes).items():
            report.set(name, entry)

        failed = sum(1 for _, e in report.entries() if e.error)
        logger.info(f"q={q:g} 报告完成，失败项 {failed}")
        return report

    def _measure_dims(self, report: DimReport, q: float) -> None:
        inp = self.inputs
        ladder = inp.eps_ladder or config.get("dims", "eps_ladder", default=[0.5, 0.2, 0.1, 0.05])
        headline_eps = min(ladder)
        analysis = MeasureDimsAnalysis(inp.mu, inp.pi, q, inp.cfg,
                                       inp.selection_level, inp.mass_threshold)

        for bound in ("lower", "upper"):
            def small():
                sel = analysis.small(bound)
                return ReportEntry(value=sel.value, estimate=sel.estimate,
                                   note=sel.label)
            report.set(f"small_{bound}", _guarded(f"small_{bound}(q={q})", small))

            for eps in sorted(ladder, reverse=True):
                def big(eps=eps):
                    sel = analysis.big(eps, bound)
                    return ReportEntry(value=sel.value, estimate=sel.estimate,
                                       note=f"{sel.label}, mass={sel.retained_mass:.6g}")
                entry = _guarded(f"big_{bound}(q={q}, eps={eps})", big)
                report.set(f"big_{bound}@eps={eps:g}", entry)
                if eps == headline_eps:
                    report.set(f"big_{bound}", entry)
