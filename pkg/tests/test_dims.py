"""
维数估计测试
"""
import math
from dataclasses import replace

import pytest

from dims import (
    DimReport, ReportBuilder, ReportEntry, ReportInputs, ScaleConfig, atom_net_builder,
    cylinder_net, cylinder_representatives, d_extremes, d_unif, d_unif_max_min, doubling_ratio,
    lower_dim, measure_dims, point_net, tau, tau_loc, tau_loc_max, typical_predictions, upper_dim,
)
from dims.measure_dims import MeasureDimsAnalysis, big_dim_trend
from errors import ConfigError, EmptyNetError, MeasureError, ThresholdError
from measure import Region, dirac
from typgen import finite_net_measure

LOG3_2 = math.log(2) / math.log(3)
S_MAX = math.log(5) / math.log(3)
S_MIN = math.log(1.25) / math.log(3)


def test_scale_config_validation():
    with pytest.raises(ConfigError):
        ScaleConfig(k_lo=5, k_hi=5)
    with pytest.raises(ConfigError):
        ScaleConfig(mode="sampling")
    with pytest.raises(ConfigError):
        ScaleConfig(variant="nearest")
    cfg = ScaleConfig.from_config(base=2, k_lo=None)
    assert cfg.base == 2
    assert list(cfg.ks) == list(range(cfg.k_lo, cfg.k_hi + 1))
    assert cfg.radius(3) == pytest.approx(1 / 8)


def test_tau_uniform_cantor(cantor, cantor_cfg):
    assert tau(cantor, 0.0, cantor_cfg).upper == pytest.approx(LOG3_2, abs=1e-9)
    assert tau(cantor, 1.0, cantor_cfg).upper == pytest.approx(0.0, abs=1e-9)
    assert tau(cantor, 2.0, cantor_cfg).upper == pytest.approx(-LOG3_2, abs=1e-9)


def test_tau_biased_cantor(biased, cantor_cfg):
    # 每个尺度上 Σ = (0.2^q + 0.8^q)^k
    for q in (-1.0, 2.0):
        expected = math.log(0.2 ** q + 0.8 ** q) / math.log(3)
        estimate = tau(biased, q, cantor_cfg)
        assert estimate.lower == pytest.approx(expected, abs=1e-9)
        assert estimate.upper == pytest.approx(expected, abs=1e-9)


def test_packing_mode_close_to_covering(cantor, cantor_cfg):
    packing = replace(cantor_cfg, mode="packing")
    for q in (-1.0, 0.0, 1.0):
        assert abs(tau(cantor, q, packing).upper - tau(cantor, q, cantor_cfg).upper) <= 0.08


def test_upper_dim_on_subset(cantor, cantor_cfg):
    # 左半部分仍是 Cantor 集
    left = Region.ball((1 / 6,), 0.2)
    assert upper_dim(cantor, left, 0.0, cantor_cfg).upper == pytest.approx(LOG3_2, abs=1e-9)
    assert lower_dim(cantor, left, 0.0, cantor_cfg).lower == pytest.approx(LOG3_2, abs=1e-9)


def test_d_extremes_biased(biased, cantor_cfg):
    minus, plus = d_extremes(biased, cantor_cfg)
    assert minus.upper == pytest.approx(S_MAX, abs=1e-6)
    assert plus.lower == pytest.approx(S_MIN, abs=1e-6)


def test_d_unif_biased(biased_ifs, biased, cantor_cfg):
    nets = [cylinder_net(biased_ifs, d, 0.6, cantor_cfg.frame) for d in (1, 2, 3, 4)]
    assert d_unif(biased, nets, cantor_cfg, "minus") == pytest.approx(S_MAX, abs=1e-6)
    assert d_unif(biased, nets, cantor_cfg, "plus") == pytest.approx(S_MIN, abs=1e-6)

    intersecting = replace(cantor_cfg, variant="intersecting")
    assert d_unif(biased, nets, intersecting, "minus") == pytest.approx(S_MAX, abs=0.05)
    assert d_unif(biased, nets, intersecting, "plus") == pytest.approx(S_MIN, abs=0.05)


def test_d_unif_max_min_biased(biased_ifs, biased, cantor_cfg):
    outer = cylinder_net(biased_ifs, 1, 0.6, cantor_cfg.frame)
    inner = [cylinder_net(biased_ifs, d, 0.6, cantor_cfg.frame) for d in (2, 3, 4)]
    unif_max_minus, max_minus, unif_min_plus, min_plus = d_unif_max_min(biased, outer, inner, cantor_cfg)
    for value in (unif_max_minus, max_minus):
        assert value == pytest.approx(S_MAX, abs=0.08)
    for value in (unif_min_plus, min_plus):
        assert value == pytest.approx(S_MIN, abs=0.08)


def test_d_unif_empty_neighbourhood(cantor, cantor_cfg):
    with pytest.raises(EmptyNetError):
        d_unif(cantor, [point_net([[0.5]], 0.05)], cantor_cfg, "minus")
    with pytest.raises(EmptyNetError):
        d_unif(cantor, [], cantor_cfg, "minus")


def test_tau_loc_zero_interval(zero_interval, zero_cfg):
    net = point_net([[0.0], [1.5]], 0.5)
    assert tau_loc(zero_interval, 0.0, net, zero_cfg) == pytest.approx(0.0, abs=1e-12)

    outer = point_net([[0.0], [1.5]], 0.6)
    builder = atom_net_builder(zero_interval, 4, 0.25)
    assert tau_loc_max(zero_interval, 0.0, outer, builder, zero_cfg) == pytest.approx(1.0, abs=0.05)


def test_d_max_min_zero_interval(zero_interval, zero_cfg):
    outer = point_net([[0.0], [1.5]], 0.6)
    inner = [point_net([[0.0], [1.25], [1.75]], 0.25)]
    _, max_minus, _, min_plus = d_unif_max_min(zero_interval, outer, inner, zero_cfg)
    assert max_minus == pytest.approx(1.0, abs=0.08)
    assert min_plus == pytest.approx(0.0, abs=0.05)


def test_doubling_ratio_cantor(cantor_ifs, cantor, cantor_cfg):
    sample = cylinder_representatives(cantor_ifs, 6)
    ratio = doubling_ratio(cantor, sample, cantor_cfg)
    assert 1.0 <= ratio <= 3.0 + 1e-9


def test_measure_dims_zero_interval(zero_interval, zero_cfg):
    pts = [[0.0], [1.0 + 1024.5 / 4096], [1.0 + 3072.5 / 4096]]
    mu = finite_net_measure(pts, 3)
    small = measure_dims(mu, zero_interval, 0.0, 0.05, "small", "upper", zero_cfg, selection_level=2)
    big = measure_dims(mu, zero_interval, 0.0, 0.05, "big", "upper", zero_cfg, selection_level=2)
    assert small == pytest.approx(0.0, abs=1e-12)
    assert big == pytest.approx(1.0, abs=0.05)

    with pytest.raises(ThresholdError):
        measure_dims(mu, zero_interval, 0.0, 0.05, "small", "upper", zero_cfg,
                     selection_level=2, mass_threshold=0.5)
    with pytest.raises(MeasureError):
        measure_dims(mu, zero_interval, 0.0, 0.05, "medium", "upper", zero_cfg)


def test_measure_dims_point_mass(cantor, cantor_cfg):
    mu = dirac(cantor.atoms[5])
    for which in ("small", "big"):
        for bound in ("lower", "upper"):
            value = measure_dims(mu, cantor, 0.0, 0.05, which, bound, cantor_cfg, selection_level=2)
            assert value == pytest.approx(0.0, abs=0.05)

    analysis = MeasureDimsAnalysis(mu, cantor, 0.0, cantor_cfg, selection_level=2)
    assert analysis.small().atom == tuple(cantor.atoms[5].tolist())
    assert analysis.big(0.05).label.startswith("atom=")


def test_point_mass_off_support_falls_back_to_cells(cantor, cantor_cfg):
    # 0.5 不是 π 的原子，只剩网格单元候选
    mu = dirac([0.5])
    with pytest.raises(ThresholdError):
        measure_dims(mu, cantor, 0.0, 0.05, "small", "upper", cantor_cfg, selection_level=2)


def test_big_dominates_small(biased, cantor_cfg):
    analysis = MeasureDimsAnalysis(biased, biased, 1.0, cantor_cfg, selection_level=2)
    small = analysis.small("upper").value
    for eps, value in big_dim_trend(analysis, [0.5, 0.2, 0.05]):
        assert value >= small
    with pytest.raises(MeasureError):
        analysis.big(1.0)


def test_report_entries_and_values():
    report = DimReport(q=1.0)
    report.set("tau", ReportEntry(value=0.5))
    report.set("D_minus", ReportEntry(error="EmptyNetError: 无原子"))
    report.set("doubling_ratio", ReportEntry(value=2.0))
    assert report.value("tau") == 0.5
    assert report.value("D_minus") is None
    assert report.value("doubling_ratio") == 2.0
    assert [name for name, _ in report.entries()] == ["tau", "D_minus", "doubling_ratio"]


def test_typical_predictions():
    report = DimReport(q=2.0)
    for name, value in (("tau_loc", 0.1), ("tau_loc_max", 0.4), ("D_unif_minus", 1.5),
                        ("D_max_minus", 1.2), ("D_unif_max_minus", 1.4),
                        ("D_minus", 1.6), ("D_plus", 0.3)):
        report.set(name, ReportEntry(value=value))
    out = typical_predictions(report, doubling_ok=True, s_extremes=(0.2, 1.5))
    assert out["typical_big_upper"].value == 0.4
    assert out["typical_small_upper"].value == 0.1
    assert out["typical_big_lower"].value == pytest.approx(-3.0)
    assert out["typical_small_lower_min"].value == pytest.approx(-2.8)
    assert out["typical_small_lower_max"].value == pytest.approx(-2.4)
    assert out["typical_lower_closed_form"].value == pytest.approx(-3.0)

    negative = DimReport(q=-1.0)
    out = typical_predictions(negative)
    assert out["typical_big_lower"].error is not None


def test_report_builder_isolates_failures(cantor, cantor_cfg):
    inputs = ReportInputs(pi=cantor, cfg=cantor_cfg, nets=[point_net([[5.0]], 0.1)])
    report = ReportBuilder(inputs).for_q(0.0)
    assert report.tau.ok
    assert report.value("tau") == pytest.approx(LOG3_2, abs=1e-9)
    assert report.D_unif_minus.error is not None
    assert report.tau_loc.error is not None
    assert report.D_minus.ok


def test_report_builder_full(biased_ifs, biased, cantor_cfg):
    nets = [cylinder_net(biased_ifs, d, 0.6, cantor_cfg.frame) for d in (1, 2)]
    inputs = ReportInputs(
        pi=biased, cfg=cantor_cfg, nets=nets,
        doubling_sample=cylinder_representatives(biased_ifs, 6),
        mu=biased, selection_level=2, eps_ladder=[0.5, 0.1],
        s_extremes=(S_MIN, S_MAX),
    )
    builder = ReportBuilder(inputs)
    report = builder.for_q(1.0)
    assert report.value("D_unif_minus") == pytest.approx(S_MAX, abs=1e-6)
    assert report.value("small_upper") <= report.value("big_upper")
    assert report.value("big_upper@eps=0.1") == report.value("big_upper")
    assert report.value("typical_lower_closed_form") == pytest.approx(-S_MAX)
    assert builder.doubling_ok is not None
