"""
典型测度构造测试
"""
import numpy as np
import pytest

from errors import ConfigError, MeasureError, ScanExhaustedError, SupportConditionError
from experiments import RunConfig, build_session, generate
from measure import DiscreteMeasure, Region, ball_mass, dirac, region_mass
from typgen import (
    finite_net_measure, localized_mixture, mix, packing_mixture, verify_radius_condition,
    weighted_packing_measure,
)


def test_weighted_packing_reachable(cantor):
    wpm = weighted_packing_measure(cantor, [0.0], 1.0, 0.0, 0.5, base=3)
    assert wpm.radius == pytest.approx(1 / 3)
    assert len(wpm.centers) == 2
    assert wpm.moment >= wpm.radius ** -0.5
    assert wpm.weights.tolist() == [0.5, 0.5]
    assert verify_radius_condition(cantor, wpm)
    assert wpm.header["r_xs"] == repr(wpm.radius)
    assert wpm.measure.size == 2


def test_weighted_packing_unreachable(cantor):
    with pytest.raises(ScanExhaustedError, match="target exponent unreachable"):
        weighted_packing_measure(cantor, [0.0], 1.0, 0.0, 0.7, base=3, j_max=20)


def test_weighted_packing_weights_follow_masses(biased):
    wpm = weighted_packing_measure(biased, [0.0], 1.0, 0.5, 0.1, base=3)
    powered = biased.index.ball_masses(wpm.centers, wpm.radius) ** 0.5
    assert wpm.weights == pytest.approx(powered / powered.sum())
    assert wpm.moment >= wpm.radius ** -0.1
    assert verify_radius_condition(biased, wpm)


def test_mix_merges_coincident_atoms():
    a = DiscreteMeasure(atoms=[0.0, 1.0], weights=[0.5, 0.5])
    b = DiscreteMeasure(atoms=[1.0, 2.0], weights=[0.5, 0.5])
    m = mix([(0.5, a), (0.5, b)])
    assert m.atoms.reshape(-1).tolist() == [0.0, 1.0, 2.0]
    assert m.weights == pytest.approx([0.25, 0.5, 0.25])

    with pytest.raises(MeasureError):
        mix([(0.7, a), (0.7, b)])
    with pytest.raises(MeasureError):
        mix([])


def test_finite_net_measure():
    m = finite_net_measure([[0.0], [0.5], [1.0]], 2)
    assert m.size == 2
    assert m.weights.tolist() == [0.5, 0.5]
    weighted = finite_net_measure([[0.0], [0.5]], 2, [0.25, 0.75])
    assert weighted.weights.tolist() == [0.25, 0.75]
    with pytest.raises(MeasureError):
        finite_net_measure([[0.0]], 2)
    with pytest.raises(MeasureError):
        finite_net_measure([[0.0], [0.5]], 2, [1.0])


def test_packing_mixture_uses_dirac_outside_region(cantor):
    region = Region.ball((0.0,), 0.5)
    measure, r_a = packing_mixture(cantor, [[0.0], [1.0 - 3.0 ** -10]], [0.5, 0.5], 1.0, 0.0, 0.5,
                                   region=region, base=3)
    assert r_a == pytest.approx(1 / 3)
    assert float(measure.weights.sum()) == pytest.approx(1.0)
    far = np.isclose(measure.atoms[:, 0], 1.0 - 3.0 ** -10)
    assert measure.weights[far].sum() >= 0.5


def test_localized_mixture():
    inner = DiscreteMeasure(atoms=[0.0, 0.1], weights=[0.5, 0.5])
    outer = DiscreteMeasure(atoms=[1.0], weights=[1.0])
    m = localized_mixture(None, [0.0], 0.2, 0.3, inner, outer, margin=0.1)
    assert m.weights == pytest.approx([0.15, 0.15, 0.7])
    assert localized_mixture(None, [0.0], 0.2, 1.0, inner, outer) is inner

    with pytest.raises(SupportConditionError) as excinfo:
        localized_mixture(None, [0.0], 0.05, 0.3, inner, outer)
    assert excinfo.value.offending == [[0.1]]

    with pytest.raises(SupportConditionError):
        localized_mixture(None, [0.0], 0.2, 0.3, inner, dirac([0.25]), margin=0.1)

    with pytest.raises(MeasureError):
        localized_mixture(None, [0.0], 0.2, 0.0, inner, outer)


def test_localized_margin_from_inner_radius():
    inner = DiscreteMeasure(atoms=[0.0, 0.1], weights=[0.5, 0.5])
    # 默认余量 2·r_n = 0.08，0.25 落在 B(0, 0.28) 内
    with pytest.raises(SupportConditionError):
        localized_mixture(None, [0.0], 0.2, 0.3, inner, dirac([0.25]), inner_radius=0.04)
    m = localized_mixture(None, [0.0], 0.2, 0.3, inner, dirac([0.3]), inner_radius=0.04)
    assert m.size == 3
    with pytest.raises(ConfigError):
        localized_mixture(None, [0.0], 0.2, 0.3, inner, dirac([0.3]))


@pytest.fixture(scope="module")
def cantor_session(presets_dir):
    return build_session(RunConfig.load(presets_dir / "cantor_uniform.json"))


def _localized(outer_point, **extra):
    return {
        "kind": "localized", "z": [0.0], "kappa": 0.34, "lambda": 0.5,
        "inner": {"kind": "packing", "x": [0.0], "s": 0.34, "q": 0.0, "t": 0.5},
        "outer": {"kind": "finite_net", "points": [[outer_point]], "snap": False},
        **extra,
    }


def test_generate_localized_uses_packing_radius(cantor_session):
    # 0.3401 只比 κ 远 1e-4，落在 2·r_xs 余量之内
    with pytest.raises(SupportConditionError) as excinfo:
        generate(cantor_session, _localized(0.3401))
    assert excinfo.value.offending == [[0.3401]]

    measure, header = generate(cantor_session, _localized(0.7))
    r_xs = float(header["r_n"])
    assert 0.0 < r_xs < 0.34
    assert region_mass(measure, Region.ball((0.0,), 0.34)) == pytest.approx(0.5, abs=1e-12)

    measure, _ = generate(cantor_session, _localized(0.3401, margin=0.0))
    assert 0.3401 in measure.atoms[:, 0].tolist()


def test_generate_localized_needs_radius_or_margin(cantor_session):
    spec = _localized(0.7)
    spec["inner"] = {"kind": "finite_net", "points": [[0.0]]}
    with pytest.raises(ConfigError):
        generate(cantor_session, spec)
    spec["margin"] = 0.1
    measure, _ = generate(cantor_session, spec)
    assert measure.size == 2


def test_mix_is_linear_in_ball_mass():
    rng = np.random.default_rng(4)
    shared = rng.random(3)
    a = DiscreteMeasure(atoms=np.concatenate([shared, rng.random(2)]), weights=rng.dirichlet(np.ones(5)))
    b = DiscreteMeasure(atoms=np.concatenate([rng.random(3), shared]), weights=rng.dirichlet(np.ones(6)))
    m = mix([(0.25, a), (0.75, b)])
    assert m.size == 8
    for x, r in zip(rng.random(25), rng.uniform(0.0, 0.6, 25)):
        expected = 0.25 * ball_mass(a, [x], r) + 0.75 * ball_mass(b, [x], r)
        assert abs(ball_mass(m, [x], r) - expected) <= 1e-12
