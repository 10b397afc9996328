#!/usr/bin/env python3
"""
Тесты эллиптической модели CGF, оракулов и проверки допустимости
"""

import json
import math

import numpy as np
import pytest

from models.aggregation import aggregate_cgf, sum_cumulants
from models.cgf import AggregationMap, EllipticalCgf, GammaCgf
from models.validation import validate_model
from utils.errors import DomainError, InsufficientCoefficientsError

STATION_COEFFS = (0.999, 0.1101, 0.1332)


def random_model(seed: int, dimension: int = 3, coeffs=STATION_COEFFS) -> EllipticalCgf:
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dimension, dimension))
    return EllipticalCgf(rng.normal(size=dimension), a @ a.T + 0.1 * np.eye(dimension), coeffs)


def finite_gradient(fn, s, h=1e-6):
    s = np.asarray(s, dtype=float)
    grad = np.zeros_like(s)
    for j in range(s.size):
        step = np.zeros_like(s)
        step[j] = h
        grad[j] = (fn(s + step) - fn(s - step)) / (2 * h)
    return grad


def test_value_at_origin_is_zero():
    model = random_model(0)
    assert model.value(np.zeros(3)) == 0.0


def test_gaussian_model_is_quadratic():
    gamma = np.array([[2.0, 0.3], [0.3, 1.0]])
    model = EllipticalCgf.gaussian([0.0, 0.0], gamma)
    s = np.array([0.4, -1.1])
    assert model.value(s) == pytest.approx(0.5 * s @ gamma @ s, rel=1e-15)
    np.testing.assert_allclose(model.gradient(s), gamma @ s, rtol=1e-15)
    np.testing.assert_allclose(model.hessian(s), gamma, rtol=1e-15)


def test_truncated_series_hand_value():
    model = EllipticalCgf(np.zeros(2), np.eye(2), (1.0, 0.1101, 0.1332))
    # q = 1: K = 1 + 0.1101/2 + 0.1332/6
    assert model.value([1.0, 1.0]) == pytest.approx(1.0 + 0.1101 / 2 + 0.1332 / 6, rel=1e-14)


def test_origin_derivatives():
    model = random_model(1)
    np.testing.assert_allclose(model.gradient(np.zeros(3)), model.m)
    np.testing.assert_allclose(model.hessian(np.zeros(3)), STATION_COEFFS[0] * model.gamma)
    np.testing.assert_allclose(model.mean, model.m)


@pytest.mark.parametrize('seed', range(5))
def test_gradient_and_hessian_match_finite_differences(seed):
    model = random_model(seed)
    s = np.random.default_rng(100 + seed).normal(scale=0.3, size=3)
    np.testing.assert_allclose(model.gradient(s), finite_gradient(model.value, s), rtol=1e-6, atol=1e-8)
    numeric_hessian = np.array([finite_gradient(lambda t: model.gradient(t)[j], s) for j in range(3)])
    np.testing.assert_allclose(model.hessian(s), numeric_hessian, rtol=1e-6, atol=1e-8)


def test_convex_along_rays():
    model = random_model(7)
    rng = np.random.default_rng(7)
    for _ in range(10):
        direction = rng.normal(size=3)
        for t in np.linspace(-3.0, 3.0, 25):
            assert direction @ model.hessian(t * direction) @ direction >= 0.0


def test_marginal_restricts_parameters():
    model = random_model(2, dimension=4)
    sub = model.marginal([3, 1])
    np.testing.assert_array_equal(sub.m, model.m[[1, 3]])
    np.testing.assert_array_equal(sub.gamma, model.gamma[np.ix_([1, 3], [1, 3])])
    s = np.array([0.0, 0.2, 0.0, -0.3])
    assert sub.value([0.2, -0.3]) == pytest.approx(model.value(s), rel=1e-14)


def test_cumulant_tensor_sums_to_sum_cumulants():
    model = random_model(3)
    for order in (2, 4, 6):
        dense = model.cumulant_tensor(order).to_dense()
        assert dense.sum() == pytest.approx(sum_cumulants(model, range(3), order), rel=1e-12)
    assert not model.cumulant_tensor(3).values
    np.testing.assert_allclose(
        [model.cumulant_tensor(1)[(j,)] for j in range(3)], model.m
    )


def test_fourth_order_tensor_entries():
    gamma = np.array([[1.0, 0.5], [0.5, 2.0]])
    model = EllipticalCgf(np.zeros(2), gamma, (1.0, 0.3))
    tensor = model.cumulant_tensor(4)
    # κ_0000 = 3 c2 Γ00², κ_0011 = c2 (Γ00 Γ11 + 2 Γ01²)
    assert tensor[(0, 0, 0, 0)] == pytest.approx(0.3 * 3.0)
    assert tensor[(0, 0, 1, 1)] == pytest.approx(0.3 * (2.0 + 2 * 0.25))


def test_missing_coefficient_is_an_error():
    model = EllipticalCgf.gaussian([0.0], [[1.0]])
    with pytest.raises(InsufficientCoefficientsError) as info:
        model.cumulant_tensor(4)
    assert info.value.order == 4
    assert info.value.available == 1
    explicit = EllipticalCgf([0.0], [[1.0]], (1.0, 0.0))
    assert explicit.cumulant_tensor(4)[(0, 0, 0, 0)] == 0.0


@pytest.mark.parametrize('m, gamma, coeffs', [
    ([0.0, 0.0], [[1.0, 0.0], [0.5, 1.0]], (1.0,)),
    ([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]], (1.0,)),
    ([0.0], [[1.0, 0.0], [0.0, 1.0]], (1.0,)),
    ([0.0], [[1.0]], ()),
    ([math.nan], [[1.0]], (1.0,)),
])
def test_invalid_models_are_rejected(m, gamma, coeffs):
    with pytest.raises(DomainError):
        EllipticalCgf(m, gamma, coeffs)


def test_dimension_mismatch_on_evaluation():
    with pytest.raises(DomainError):
        random_model(0).value([1.0, 2.0])


def test_model_is_immutable():
    model = random_model(4)
    with pytest.raises(ValueError):
        model.gamma[0, 0] = 5.0


def test_serialization_is_bit_exact():
    model = random_model(5)
    restored = EllipticalCgf.from_dict(json.loads(json.dumps(model.to_dict())))
    np.testing.assert_array_equal(restored.m, model.m)
    np.testing.assert_array_equal(restored.gamma, model.gamma)
    assert restored.coeffs == model.coeffs


def test_from_dict_reports_missing_fields():
    with pytest.raises(DomainError):
        EllipticalCgf.from_dict({'m': [0.0], 'coeffs': [1.0]})
    with pytest.raises(DomainError):
        EllipticalCgf.from_dict({'m': [0.0, 0.0], 'Gamma': [1.0, 0.0, 0.0], 'coeffs': [1.0]})


def test_gamma_cgf():
    cgf = GammaCgf(2.0, 1.5)
    assert cgf.value([0.0]) == 0.0
    assert cgf.gradient([0.0])[0] == pytest.approx(3.0)
    assert cgf.hessian([0.0])[0, 0] == pytest.approx(4.5)
    assert cgf.value([1.0]) == math.inf
    assert cgf.cumulant(3) == pytest.approx(2.0 * 1.5 ** 3 * 2)
    with pytest.raises(DomainError):
        GammaCgf(0.0)


def test_aggregation_map_validation():
    agg = AggregationMap.from_sets([[2, 0], [1]], 3)
    assert agg.index_sets == ((0, 2), (1,))
    np.testing.assert_array_equal(agg.indicator(), [[1, 0], [0, 1], [1, 0]])
    for sets in ([[0, 1], [1, 2]], [[0], [2]], [[0, 1, 2], []]):
        with pytest.raises(DomainError):
            AggregationMap.from_sets(sets, 3)


def test_aggregate_identity_map():
    model = random_model(6)
    aggregated = aggregate_cgf(model, AggregationMap.singletons(3))
    s = np.array([0.1, -0.2, 0.3])
    assert aggregated.value(s) == pytest.approx(model.value(s), rel=1e-15)
    np.testing.assert_allclose(aggregated.hessian(s), model.hessian(s))


def test_aggregate_identity_gaussian_sum():
    model = EllipticalCgf.gaussian(np.zeros(8), np.eye(8))
    aggregated = aggregate_cgf(model, AggregationMap.single(8))
    for t in (-1.0, 0.3, 2.0):
        assert aggregated.value([t]) == pytest.approx(4.0 * t * t, rel=1e-14)


def test_aggregated_derivatives_give_sum_cumulants():
    model = EllipticalCgf(np.zeros(3), random_model(8).gamma, STATION_COEFFS)
    aggregated = aggregate_cgf(model, AggregationMap.single(3))
    # K_S(t) - многочлен степени 2R: интерполяция по 2R+1 узлам восстанавливает его точно
    nodes = np.cos(np.pi * (np.arange(7) + 0.5) / 7) * 0.5
    coefficients = np.polynomial.polynomial.polyfit(nodes, [aggregated.value([t]) for t in nodes], 6)
    for order in (2, 4):
        derivative = coefficients[order] * math.factorial(order)
        assert derivative == pytest.approx(sum_cumulants(model, range(3), order), rel=1e-5)


def test_validate_gaussian_model():
    report = validate_model(EllipticalCgf.gaussian([0.0, 0.0], np.eye(2)))
    assert report.valid
    assert report.mixture.point_mass == pytest.approx(1.0)


def test_validate_rejects_negative_variance_of_v():
    report = validate_model(EllipticalCgf([0.0], [[1.0]], (1.0, -0.5)))
    assert not report.valid
    assert report.messages


def test_validate_station_coefficients():
    report = validate_model(EllipticalCgf(np.zeros(2), np.eye(2), STATION_COEFFS))
    assert report.valid
    assert report.mixture.n_components == 5
    assert report.residual < 1e-3
