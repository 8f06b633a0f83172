"""
DimLab - 多重分形盒维数实验室

典型值预测 - 由估计出的指数推出典型测度的小/大多重分形盒维数

big upper = τ_loc,max(q)；small upper = τ_loc(q)（需 π 倍增）；
big lower = -q·D_unif(−∞)（q ≥ 0）或 -q·D_unif(+∞)（q ≤ 0）；
small lower 落在 [-q·D_max(−∞), -q·D_unif,max(−∞)]（q ≥ 0）
或 [-q·D_min(+∞), -q·D_unif,min(+∞)]（q ≤ 0）之间。
"""
from typing import Optional

from .types import DimReport, ReportEntry


def _entry(value: Optional[float], note: str) -> ReportEntry:
    if value is None:
        return ReportEntry(error=f"缺少输入: {note}", note=note)
    return ReportEntry(value=value, note=note)


def _bracket(a: Optional[float], b: Optional[float]) -> tuple[Optional[float], Optional[float]]:
    if a is None or b is None:
        return None, None
    return min(a, b), max(a, b)


def typical_predictions(report: DimReport, doubling_ok: Optional[bool] = None,
                        s_extremes: Optional[tuple] = None) -> dict:
    """
    由同一 q 的报告推出典型值预测

    Args:
        report: 已填好指数的报告
        doubling_ok: π 是否看起来是倍增测度（None 表示未知）
        s_extremes: 自相似输入的 (s_min, s_max)，给出封闭形式

    Returns:
        {名称: ReportEntry}，名称以 typical_ 开头
    """
    q = report.q
    v = report.value
    out = {}

    out["typical_big_upper"] = _entry(v("tau_loc_max"), "τ_loc,max(q)")
    note = "τ_loc(q)" if doubling_ok is not False else "τ_loc(q)，π 未通过倍增诊断"
    out["typical_small_upper"] = _entry(v("tau_loc"), note)

    if q >= 0:
        big_lower = None if v("D_unif_minus") is None else -q * v("D_unif_minus")
        lo, hi = _bracket(None if v("D_max_minus") is None else -q * v("D_max_minus"),
                          None if v("D_unif_max_minus") is None else -q * v("D_unif_max_minus"))
        coarse = _bracket(None if v("D_minus") is None else -q * v("D_minus"),
                          None if v("D_plus") is None else -q * v("D_plus"))
    else:
        big_lower = None if v("D_unif_plus") is None else -q * v("D_unif_plus")
        lo, hi = _bracket(None if v("D_min_plus") is None else -q * v("D_min_plus"),
                          None if v("D_unif_min_plus") is None else -q * v("D_unif_min_plus"))
        coarse = _bracket(None if v("D_plus") is None else -q * v("D_plus"),
                          None if v("D_minus") is None else -q * v("D_minus"))

    out["typical_big_lower"] = _entry(big_lower, "-q·D_unif")
    out["typical_small_lower_min"] = _entry(lo, "小下维数区间下端")
    out["typical_small_lower_max"] = _entry(hi, "小下维数区间上端")
    out["typical_coarse_lower_min"] = _entry(coarse[0], "由 D(±∞) 得到的较粗区间下端")
    out["typical_coarse_lower_max"] = _entry(coarse[1], "由 D(±∞) 得到的较粗区间上端")

    if s_extremes is not None:
        s_min, s_max = s_extremes
        closed = -q * s_max if q >= 0 else -q * s_min
        out["typical_lower_closed_form"] = ReportEntry(value=closed, note="自相似 OSC 封闭形式")
    return out
