"""
覆盖/填充求和与斜率测试
"""
import math

import numpy as np
import pytest

from counting import (
    ScaleSeries, covering_sum, greedy_cover, greedy_packing, grid_moment_sum, packing_sum,
    slope_bounds,
)
from counting.sums import PLAN_CACHE
from errors import EmptyRegionError, MeasureError, TooFewScalesError
from measure import BoundingBox, DiscreteMeasure, Region


@pytest.fixture
def ten_points():
    """0, 0.1, ..., 0.9 等权"""
    return DiscreteMeasure(atoms=np.arange(10) / 10.0, weights=np.full(10, 0.1))


def test_series_validation():
    with pytest.raises(MeasureError):
        ScaleSeries(base=2, ks=(1, 2), values=(1.0,))
    with pytest.raises(MeasureError):
        ScaleSeries(base=2, ks=(2, 1), values=(1.0, 2.0))
    with pytest.raises(MeasureError):
        ScaleSeries(base=2, ks=(1, 2), values=(1.0, 0.0))


def test_slope_of_exact_power_law():
    series = ScaleSeries.sample(3, 2, 7, lambda r: 5.0 * r ** -0.75)
    estimate = slope_bounds(series)
    assert estimate.lower == pytest.approx(0.75)
    assert estimate.upper == pytest.approx(0.75)
    assert estimate.ols == pytest.approx(0.75)
    assert estimate.window == (2, 7)


def test_slope_bounds_bracket_ols():
    series = ScaleSeries(base=2, ks=(1, 2, 3, 4), values=(2.0, 4.0, 16.0, 32.0))
    estimate = slope_bounds(series)
    assert estimate.lower == pytest.approx(1.0)
    assert estimate.upper == pytest.approx(2.0)
    assert estimate.lower <= estimate.ols <= estimate.upper


def test_slope_needs_three_scales():
    series = ScaleSeries(base=2, ks=(1, 2, 3), values=(1.0, 2.0, 4.0))
    with pytest.raises(TooFewScalesError):
        slope_bounds(series, k_lo=2)


def test_cover_tie_break_follows_q(ten_points):
    region = Region.ball((0.45,), 1.0)
    # 内部原子的球各覆盖 3 个原子；最后只剩 0.9 时，0.8 与 0.9 的球都只覆盖 1 个
    cover = greedy_cover(ten_points, region, 0.15, q=1.0)
    assert cover.indices.tolist() == [1, 4, 7, 9]
    cover = greedy_cover(ten_points, region, 0.15, q=-1.0)
    assert cover.indices.tolist() == [1, 4, 7, 8]


def test_covering_sum_on_points(ten_points):
    region = Region.ball((0.45,), 1.0)
    assert covering_sum(ten_points, region, 0.15, 0.0) == 4.0
    assert covering_sum(ten_points, region, 0.15, 1.0) == pytest.approx(0.3 * 3 + 0.2)


def test_packing_separation(ten_points):
    region = Region.ball((0.45,), 1.0)
    packing = greedy_packing(ten_points, region, 0.15, q=1.0)
    assert packing.indices.tolist() == [1, 5, 9]
    assert packing.separation_ok
    assert packing_sum(ten_points, region, 0.15, 0.0) == 3.0
    assert packing_sum(ten_points, region, 0.15, 1.0) == pytest.approx(0.8)
    # 膨胀 c=2 后每个球质量更大
    assert packing_sum(ten_points, region, 0.15, 1.0, c=2.0) > 0.8


def test_lexicographic_order(ten_points):
    region = Region.ball((0.45,), 1.0)
    cover = greedy_cover(ten_points, region, 0.15, q=1.0, order="lexicographic")
    assert cover.indices.tolist() == [1, 4, 7, 8]
    with pytest.raises(MeasureError):
        greedy_cover(ten_points, region, 0.15, q=1.0, order="random")


def test_empty_region(ten_points):
    with pytest.raises(EmptyRegionError):
        covering_sum(ten_points, Region.ball((5.0,), 0.1), 0.1, 0.0)


def test_cover_on_cantor_counts_cylinders(cantor):
    region = Region.enclosing(cantor)
    for k in (3, 4, 5):
        cover = greedy_cover(cantor, region, 3.0 ** -k, q=0.0)
        assert cover.count == 2 ** k


@pytest.mark.parametrize("q", [-1.0, 0.0, 2.0])
def test_covering_matches_grid(cantor, biased, q):
    frame = BoundingBox.unit(1)
    for measure in (cantor, biased):
        region = Region.enclosing(measure)
        for k in (3, 6):
            exact = grid_moment_sum(measure, 3, k, q, frame)
            greedy = covering_sum(measure, region, 3.0 ** -k, q)
            assert greedy == pytest.approx(exact, rel=1e-9)


def test_cover_on_interval(zero_interval):
    # [1, 1.25) 中 1024 个原子，r = 2^-4 的球每个覆盖 511 个
    region = Region.ball((1.0 + 0.5 / 4096,), 0.25)
    assert len(region.atom_indices(zero_interval)) == 1024
    assert greedy_cover(zero_interval, region, 2.0 ** -4, q=0.0).count == 3
    assert greedy_cover(zero_interval, region, 2.0 ** -8, q=0.0).count == 34


def test_cover_centers_are_region_atoms(biased):
    region = Region.ball((0.8,), 0.15)
    cover = greedy_cover(biased, region, 3.0 ** -5, q=2.0)
    inside = set(region.atom_indices(biased).tolist())
    assert set(cover.indices.tolist()) <= inside
    covered = biased.index.neighbors(cover.centers, 3.0 ** -5).sum(axis=0)
    assert np.all(np.asarray(covered).reshape(-1)[sorted(inside)] > 0)
    assert math.isfinite(covering_sum(biased, region, 3.0 ** -5, 2.0))


@pytest.mark.parametrize("which", ["covering", "packing"])
def test_sums_nonincreasing_in_q(biased, which):
    region = Region.enclosing(biased)
    total = covering_sum if which == "covering" else packing_sum
    for k in (3, 5):
        values = [total(biased, region, 3.0 ** -k, q, order="lexicographic")
                  for q in (-2.0, -1.0, 0.0, 1.0, 2.0)]
        for a, b in zip(values, values[1:]):
            assert b <= a * (1 + 1e-12)


def test_cover_count_dominates_packing_at_double_radius(cantor, biased, ten_points):
    for measure in (cantor, biased, ten_points):
        region = Region.enclosing(measure)
        for r in (0.05, 0.15, 3.0 ** -4):
            cover = greedy_cover(measure, region, r, q=0.0)
            packing = greedy_packing(measure, region, 2 * r, q=0.0)
            assert cover.count >= packing.count


@pytest.mark.parametrize("q", [0.0, 1.0, 2.0])
def test_packing_below_covering_on_cantor(cantor, biased, q):
    for measure in (cantor, biased):
        region = Region.enclosing(measure)
        for k in range(3, 9):
            r = 3.0 ** -k
            assert packing_sum(measure, region, r, q) <= covering_sum(measure, region, r, q) * (1 + 1e-12)


def test_slopes_of_product_series():
    wiggle = ScaleSeries(base=2, ks=(1, 2, 3, 4, 5), values=(2.0, 3.0, 9.0, 11.0, 40.0))
    power = ScaleSeries.sample(2, 1, 5, lambda r: 7.0 * r ** -0.5)
    product = ScaleSeries(base=2, ks=wiggle.ks,
                          values=tuple(a * b for a, b in zip(wiggle.values, power.values)))
    w, p, wp = slope_bounds(wiggle), slope_bounds(power), slope_bounds(product)
    assert wp.lower == pytest.approx(w.lower + p.lower)
    assert wp.upper == pytest.approx(w.upper + p.upper)
    assert wp.ols == pytest.approx(w.ols + p.ols)

    # 两个一般序列：局部斜率逐项相加，区间只能收紧
    other = ScaleSeries(base=2, ks=wiggle.ks, values=(1.0, 5.0, 6.0, 30.0, 31.0))
    both = ScaleSeries(base=2, ks=wiggle.ks,
                       values=tuple(a * b for a, b in zip(wiggle.values, other.values)))
    o, wo = slope_bounds(other), slope_bounds(both)
    assert wo.lower >= w.lower + o.lower - 1e-12
    assert wo.upper <= w.upper + o.upper + 1e-12
    assert wo.ols == pytest.approx(w.ols + o.ols)


def test_cover_plans_live_on_the_index(ten_points):
    measure = DiscreteMeasure(atoms=ten_points.atoms, weights=ten_points.weights)
    for i in range(PLAN_CACHE + 5):
        greedy_cover(measure, Region.ball((0.45,), 1.0), 0.01 + i * 1e-3, q=0.0)
    assert len(measure.index.plans) == PLAN_CACHE
