#!/usr/bin/env python3
"""
Тесты Монте-Карло: сэмплирование, полосы квантилей, блочные максимумы, групповые статистики
"""

import numpy as np
import pytest

from conftest import STATION_COEFFS, STATION_GAMMA
from estimation.mixture_fit import fit_gamma_mixture
from models.aggregation import block_sum, group_cumulants, sum_cumulants
from models.cgf import AggregationMap, EllipticalCgf
from models.mixture import GammaMixture
from simulation.bands import (
    SimulationPlan, block_maxima_bands, block_maxima_ecdf, group_statistics, monte_carlo_bands, run_monte_carlo,
)
from simulation.sampler import covariance_factor, draw, replicate_rng, sample_model
from utils.errors import DomainError

GAUSSIAN = EllipticalCgf.gaussian(np.zeros(2), np.array([[1.0, 0.3], [0.3, 2.0]]))
POINT = GammaMixture.degenerate(1.0)


@pytest.fixture(scope='module')
def station_mixture():
    return fit_gamma_mixture(STATION_COEFFS, starts=8)


def test_replicate_streams_are_reproducible():
    first = replicate_rng(42, 3).normal(size=5)
    again = replicate_rng(42, 3).normal(size=5)
    other = replicate_rng(42, 4).normal(size=5)
    np.testing.assert_array_equal(first, again)
    assert not np.array_equal(first, other)
    with pytest.raises(DomainError):
        replicate_rng(None)
    with pytest.raises(DomainError):
        replicate_rng(-1)


def test_sample_model_is_deterministic():
    a = sample_model(GAUSSIAN, POINT, 100, seed=7)
    b = sample_model(GAUSSIAN, POINT, 100, seed=7)
    np.testing.assert_array_equal(a, b)
    assert a.shape == (100, 2)


def test_sample_model_rejects_foreign_mixture():
    with pytest.raises(DomainError):
        sample_model(GAUSSIAN, GammaMixture.single(2.0, 1.0), 10, seed=1)
    with pytest.raises(DomainError):
        draw(GAUSSIAN, POINT, 0, replicate_rng(1))


def test_gaussian_sample_covariance():
    data = sample_model(GAUSSIAN, POINT, 50000, seed=3)
    np.testing.assert_allclose(np.cov(data, rowvar=False), GAUSSIAN.gamma, atol=0.05)


def test_station_model_marginal_variance(station_mixture):
    model = EllipticalCgf(np.zeros(8), STATION_GAMMA, STATION_COEFFS)
    data = sample_model(model, station_mixture, 100000, seed=2015)
    np.testing.assert_allclose(data.var(axis=0), STATION_COEFFS[0] * np.diag(STATION_GAMMA), rtol=0.05)


def test_covariance_factor_for_singular_gamma():
    gamma = np.ones((3, 3))
    factor = covariance_factor(gamma)
    np.testing.assert_allclose(factor @ factor.T, gamma, atol=1e-12)


def test_plan_validation():
    for kwargs in (
        {'n_per_sample': 0, 'n_replicates': 1, 'seed': 1},
        {'n_per_sample': 10, 'n_replicates': 0, 'seed': 1},
        {'n_per_sample': 10, 'n_replicates': 1, 'seed': None},
        {'n_per_sample': 10, 'n_replicates': 1, 'seed': 1, 'levels': [0.5, 0.1]},
        {'n_per_sample': 10, 'n_replicates': 1, 'seed': 1, 'levels': [1.5]},
        {'n_per_sample': 10, 'n_replicates': 1, 'seed': 1, 'block': 6},
        {'n_per_sample': 10, 'n_replicates': 1, 'seed': 1, 'band_probability': 1.0},
    ):
        with pytest.raises(DomainError):
            SimulationPlan(**kwargs)
    assert SimulationPlan(10, 1, 1, band_probability=0.9).band_quantiles == pytest.approx((0.05, 0.95))


def test_results_do_not_depend_on_workers():
    plan = SimulationPlan(500, 12, seed=99, levels=[0.1, 0.5, 0.9], block=50)
    serial = run_monte_carlo(GAUSSIAN, POINT, plan, workers=1)
    parallel = run_monte_carlo(GAUSSIAN, POINT, plan, workers=4)
    np.testing.assert_array_equal(serial.quantile_matrix(), parallel.quantile_matrix())
    for a, b in zip(serial.replicates, parallel.replicates):
        np.testing.assert_array_equal(a.maxima, b.maxima)
    assert list(serial.replicate_frame().columns) == ['replicate', 'kappa2', 'kappa4', 'kappa6']


def test_gaussian_median_band_contains_zero():
    plan = SimulationPlan(2000, 60, seed=5, levels=[0.5])
    bands = monte_carlo_bands(GAUSSIAN, POINT, plan)
    assert bands.lower[0] < 0.0 < bands.upper[0]
    with pytest.raises(DomainError):
        bands.covered()


def test_bands_with_observed_sample():
    plan = SimulationPlan(1000, 40, seed=6, levels=[0.05, 0.5, 0.95])
    observed = sample_model(GAUSSIAN, POINT, 1000, seed=1000)
    bands = monte_carlo_bands(GAUSSIAN, POINT, plan, observed=observed)
    assert np.all(bands.lower <= bands.upper)
    assert bands.covered().dtype == bool
    frame = bands.to_frame()
    assert list(frame.columns) == ['level', 'lower', 'upper', 'observed']


def test_bands_need_levels():
    with pytest.raises(DomainError):
        monte_carlo_bands(GAUSSIAN, POINT, SimulationPlan(10, 1, 1))


def test_block_maxima_ecdf():
    ecdf = block_maxima_ecdf(np.arange(105.0), 10)
    np.testing.assert_array_equal(ecdf.maxima, np.arange(9.0, 100.0, 10.0))
    assert ecdf(9.0) == pytest.approx(0.1)
    assert ecdf(8.9) == 0.0
    assert ecdf(1000.0) == 1.0
    np.testing.assert_array_equal(block_maxima_ecdf([3.0, 1.0, 2.0], 1).maxima, [1.0, 2.0, 3.0])
    with pytest.raises(DomainError):
        block_maxima_ecdf(np.arange(15.0), 10)


def test_yearly_maxima_count():
    plan = SimulationPlan(10950, 2, seed=8, block=365)
    result = run_monte_carlo(GAUSSIAN, POINT, plan)
    assert all(r.maxima.size == 30 for r in result.replicates)


def test_block_maxima_bands():
    plan = SimulationPlan(1000, 30, seed=9, block=50)
    observed = sample_model(GAUSSIAN, POINT, 1000, seed=77)
    bands = block_maxima_bands(GAUSSIAN, POINT, plan, observed=observed)
    assert bands.grid.size == 200
    assert np.all(bands.lower <= bands.upper)
    assert bands.lower.min() >= 0.0 and bands.upper.max() <= 1.0
    assert bands.observed[-1] == 1.0
    with pytest.raises(DomainError):
        block_maxima_bands(GAUSSIAN, POINT, SimulationPlan(100, 2, 1))


def test_group_statistics_match_gaussian_values():
    gamma = np.array([
        [1.0, 0.4, 0.2, 0.1],
        [0.4, 1.0, 0.3, 0.2],
        [0.2, 0.3, 1.0, 0.5],
        [0.1, 0.2, 0.5, 1.0],
    ])
    model = EllipticalCgf(np.zeros(4), gamma, (1.0, 0.0))
    agg = AggregationMap.from_sets([[0, 1], [2, 3]], 4)
    plan = SimulationPlan(4000, 20, seed=12)
    result = group_statistics(model, POINT, agg, plan)
    mean, error = result.covariance[(0, 1)]
    assert abs(mean - block_sum(model, [0, 1], [2, 3])) <= 5 * error + 1e-3
    variance, error = result.cumulants[(0, 2)]
    assert abs(variance - group_cumulants(model, [0, 1], 2)) <= 5 * error + 1e-3
    kurtosis, error = result.cumulants[(1, 4)]
    assert abs(kurtosis) <= 5 * error + 1e-3
    assert set(result.to_dict()['cumulants']) == {'0-2', '0-4', '1-2', '1-4'}


def test_replicate_cumulants_of_sum_match_model():
    gamma = np.array([[1.0, 0.4, 0.2], [0.4, 1.0, 0.3], [0.2, 0.3, 1.0]])
    mixture = GammaMixture.single(2.0, 0.5)
    model = EllipticalCgf(np.zeros(3), gamma, mixture.cumulants(3))
    plan = SimulationPlan(4000, 200, seed=2024)
    frame = run_monte_carlo(model, mixture, plan).replicate_frame()
    for order in (2, 4, 6):
        values = frame[f'kappa{order}'].to_numpy()
        error = values.std(ddof=1) / np.sqrt(values.size)
        z = (values.mean() - sum_cumulants(model, range(3), order)) / error
        assert abs(z) <= 4.0, f"κ{order}: z={z:.2f}"
