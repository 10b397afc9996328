#!/usr/bin/env python3
"""
Сквозные проверки на иллюстративном наборе: восстановление c_r, покрытие
наблюдаемых квантилей полосами Монте-Карло, групповые агрегаты, хвост суммы
"""

import math
import time

import numpy as np
import pytest

from approx.saddlepoint import lugannani_rice_tail
from conftest import STATION_COEFFS, STATION_GAMMA, STATION_QUANTILES, STATION_SUM_CUMULANTS
from estimation.coefficients import fit_coefficients
from estimation.mixture_fit import fit_gamma_mixture
from models.aggregation import aggregate_cgf, group_cov, group_cumulants
from models.cgf import AggregationMap, EllipticalCgf
from simulation.bands import SimulationPlan, group_statistics, monte_carlo_bands
from simulation.sampler import sample_model

N_PER_SAMPLE = 10950
REPLICATES = 200


@pytest.fixture(scope='module')
def fitted():
    model = EllipticalCgf(np.zeros(8), STATION_GAMMA, STATION_COEFFS)
    return model, fit_gamma_mixture(STATION_COEFFS, n_components=5)


def test_coefficient_recovery_is_fast():
    started = time.perf_counter()
    coeffs = fit_coefficients(STATION_GAMMA, STATION_SUM_CUMULANTS, (2, 4, 6))
    assert time.perf_counter() - started < 1.0
    np.testing.assert_allclose(coeffs, STATION_COEFFS, rtol=0.03)


def test_observed_quantiles_fall_inside_bands(fitted):
    model, mixture = fitted
    levels = [row[0] / 100.0 for row in STATION_QUANTILES]
    observed = np.array([row[3] for row in STATION_QUANTILES])
    plan = SimulationPlan(N_PER_SAMPLE, REPLICATES, seed=20150427, levels=levels)
    bands = monte_carlo_bands(model, mixture, plan)
    covered = (bands.lower <= observed) & (observed <= bands.upper)
    # эталонные полосы содержат наблюдение на 14 уровнях из 18
    assert int(covered.sum()) >= 12


def test_group_aggregates_agree_with_monte_carlo(fitted):
    model, mixture = fitted
    halves = [list(range(4)), list(range(4, 8))]
    agg = AggregationMap.from_sets(halves, 8)
    plan = SimulationPlan(N_PER_SAMPLE, REPLICATES, seed=1)
    result = group_statistics(model, mixture, agg, plan, orders=(2, 4))

    mean, error = result.covariance[(0, 1)]
    assert abs(mean - group_cov(model, *halves)) <= 4 * error
    assert abs(mean - group_cov(model, *halves, printed=True)) > 4 * error

    for g, group in enumerate(halves):
        for order in (2, 4):
            mean, error = result.cumulants[(g, order)]
            assert abs(mean - group_cumulants(model, group, order)) <= 4 * error
        mean, error = result.cumulants[(g, 4)]
        assert abs(mean - group_cumulants(model, group, 4, printed=True)) > 4 * error


def test_sum_tail_matches_monte_carlo_frequency(fitted):
    model, mixture = fitted
    x0 = 7.7
    sums = sample_model(model, mixture, 50000, seed=99).sum(axis=1)
    frequency = float(np.mean(sums > x0))
    error = math.sqrt(frequency * (1.0 - frequency) / sums.size)
    tail = lugannani_rice_tail(aggregate_cgf(model, AggregationMap.single(8)), x0)
    assert abs(tail - frequency) <= 3 * error
