"""
Fortet-Mourier 距离测试
"""
import numpy as np
import pytest

from errors import MeasureError, MetricCapError
from measure import DiscreteMeasure, Region, dirac
from metric import enlargement_check, fortet_mourier


def test_two_diracs():
    distance, witness = fortet_mourier(dirac([0.0]), dirac([0.5]))
    assert distance == pytest.approx(0.5, abs=1e-9)
    assert witness.violation() <= 1e-8
    values = dict(zip(witness.points[:, 0].tolist(), witness.values.tolist()))
    assert values[0.0] - values[0.5] == pytest.approx(0.5, abs=1e-9)


def test_far_diracs_saturate():
    distance, _ = fortet_mourier(dirac([0.0]), dirac([3.0]))
    assert distance == pytest.approx(2.0, abs=1e-9)


def test_identity_and_symmetry():
    rng = np.random.default_rng(5)
    mu = DiscreteMeasure(atoms=rng.random(6), weights=np.full(6, 1 / 6))
    nu = DiscreteMeasure(atoms=rng.random(4), weights=[0.1, 0.2, 0.3, 0.4])
    assert fortet_mourier(mu, mu)[0] == pytest.approx(0.0, abs=1e-9)
    assert fortet_mourier(mu, nu)[0] == pytest.approx(fortet_mourier(nu, mu)[0], abs=1e-8)


def test_triangle_inequality():
    rng = np.random.default_rng(11)
    measures = [DiscreteMeasure(atoms=rng.random(5), weights=rng.dirichlet(np.ones(5)))
                for _ in range(3)]
    a, b, c = measures
    assert fortet_mourier(a, c)[0] <= fortet_mourier(a, b)[0] + fortet_mourier(b, c)[0] + 1e-8


def test_two_dimensional_support():
    mu = DiscreteMeasure(atoms=[[0.0, 0.0], [1.0, 0.0]], weights=[0.5, 0.5])
    nu = DiscreteMeasure(atoms=[[0.0, 0.3], [1.0, 0.4]], weights=[0.5, 0.5])
    distance, _ = fortet_mourier(mu, nu)
    assert distance == pytest.approx(0.35, abs=1e-9)


def test_cap():
    mu = DiscreteMeasure(atoms=np.arange(6) / 6.0, weights=np.full(6, 1 / 6))
    with pytest.raises(MetricCapError):
        fortet_mourier(mu, dirac([2.0]), cap=5)


def test_enlargement_bound():
    mu, nu = dirac([0.0]), dirac([0.01])
    report = enlargement_check(mu, nu, Region.ball((0.0,), 0.001), 0.5, 0.5)
    assert report.applicable
    assert report.holds
    assert report.lhs == 1.0
    assert report.slack >= 0

    far = enlargement_check(dirac([0.0]), dirac([1.0]), Region.ball((0.0,), 0.1), 0.1, 0.1)
    assert not far.applicable
    assert far.holds

    with pytest.raises(MeasureError):
        enlargement_check(mu, nu, Region.ball((0.0,), 0.1), 0.0, 0.5)


def test_reference_values():
    assert fortet_mourier(dirac([0.0]), dirac([1.5]))[0] == pytest.approx(1.5, abs=1e-9)
    half = DiscreteMeasure(atoms=[0.0, 1.0], weights=[0.5, 0.5])
    assert fortet_mourier(half, dirac([0.0]))[0] == pytest.approx(0.5, abs=1e-9)
