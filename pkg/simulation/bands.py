"""
Проверка модели методом Монте-Карло: доверительные полосы квантилей суммы,
полосы ЭФР блочных максимумов, групповые статистики
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
import pandas as pd

from config import BAND_PROBABILITY
from cumulants.algebra import univariate_sample_cumulant
from models.cgf import AggregationMap, EllipticalCgf
from models.mixture import GammaMixture
from simulation.sampler import check_mixture, covariance_factor, draw, replicate_rng
from utils.errors import DomainError
from utils.logger import get_logger
from utils.workers import resolve_workers

REPLICATE_ORDERS = (2, 4, 6)
GRID_POINTS = 200


@dataclass
class SimulationPlan:
    """Размер выборки, число реплик, seed, уровни квантилей (доли) и размер блока"""
    n_per_sample: int
    n_replicates: int
    seed: int
    levels: Sequence[float] = field(default_factory=list)
    block: Optional[int] = None
    band_probability: float = BAND_PROBABILITY

    def __post_init__(self):
        self.levels = [float(level) for level in self.levels]
        if self.n_per_sample < 1:
            raise DomainError(f"n_per_sample={self.n_per_sample} должно быть >= 1")
        if self.n_replicates < 1:
            raise DomainError(f"n_replicates={self.n_replicates} должно быть >= 1")
        if self.seed is None or int(self.seed) < 0:
            raise DomainError("seed обязателен и неотрицателен")
        if any(not 0.0 <= level <= 1.0 for level in self.levels):
            raise DomainError(f"Уровни квантилей должны лежать в [0, 1]: {self.levels}")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise DomainError("Уровни квантилей должны строго возрастать")
        if self.block is not None and (self.block < 1 or self.n_per_sample // self.block < 2):
            raise DomainError(
                f"Блок {self.block} даёт меньше 2 блоков при n={self.n_per_sample}"
            )
        if not 0.0 < self.band_probability < 1.0:
            raise DomainError(f"Вероятность полосы {self.band_probability} вне (0, 1)")

    @property
    def band_quantiles(self):
        tail = 0.5 * (1.0 - self.band_probability)
        return tail, 1.0 - tail


@dataclass
class QuantileBands:
    """Полосы квантилей суммы по уровням, с наблюдаемыми значениями, если они заданы"""
    levels: List[float]
    lower: np.ndarray
    upper: np.ndarray
    band_probability: float
    observed: Optional[np.ndarray] = None

    def covered(self) -> np.ndarray:
        if self.observed is None:
            raise DomainError("Наблюдаемые квантили не заданы")
        return (self.lower <= self.observed) & (self.observed <= self.upper)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({'level': self.levels, 'lower': self.lower, 'upper': self.upper})
        frame['observed'] = self.observed if self.observed is not None else np.nan
        return frame


@dataclass
class BlockMaximaEcdf:
    """ЭФР максимумов по последовательным блокам (остаток отбрасывается)"""
    maxima: np.ndarray

    def __call__(self, x) -> np.ndarray:
        return np.searchsorted(self.maxima, np.asarray(x, dtype=float), side='right') / self.maxima.size


@dataclass
class BlockMaximaBands:
    grid: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    observed: Optional[np.ndarray] = None

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({'x': self.grid, 'lower': self.lower, 'upper': self.upper})
        frame['observed'] = self.observed if self.observed is not None else np.nan
        return frame


@dataclass
class ReplicateSummary:
    index: int
    quantiles: np.ndarray
    cumulants: dict
    maxima: Optional[np.ndarray]


@dataclass
class MonteCarloResult:
    """Сводки по всем репликам в порядке номеров"""
    plan: SimulationPlan
    replicates: List[ReplicateSummary]

    def quantile_matrix(self) -> np.ndarray:
        return np.vstack([r.quantiles for r in self.replicates])

    def replicate_frame(self) -> pd.DataFrame:
        rows = []
        for r in self.replicates:
            row = {'replicate': r.index}
            row.update({f'kappa{order}': value for order, value in r.cumulants.items()})
            rows.append(row)
        return pd.DataFrame(rows)


def block_maxima_ecdf(sums, block: int) -> BlockMaximaEcdf:
    """
    Raises:
        DomainError: меньше двух полных блоков
    """
    sums = np.asarray(sums, dtype=float).ravel()
    if block < 1:
        raise DomainError(f"Размер блока должен быть >= 1, получено {block}")
    count = sums.size // block
    if count < 2:
        raise DomainError(f"Блок {block} даёт {count} блок(ов) при n={sums.size}, нужно >= 2")
    maxima = sums[:count * block].reshape(count, block).max(axis=1)
    return BlockMaximaEcdf(np.sort(maxima))


def map_replicates(function: Callable[[int], object], n_replicates: int,
                   workers: Optional[int] = None) -> list:
    """function(номер реплики) для всех реплик в пуле; результаты в порядке номеров"""
    with ThreadPoolExecutor(max_workers=resolve_workers(workers)) as pool:
        return list(pool.map(function, range(n_replicates)))


def run_monte_carlo(model: EllipticalCgf, mix: GammaMixture, plan: SimulationPlan,
                    workers: Optional[int] = None, logger: Optional[logging.Logger] = None) -> MonteCarloResult:
    """Все реплики: квантили суммы, её кумулянты порядков 2, 4, 6 и блочные максимумы"""
    logger = logger or get_logger()
    check_mixture(model, mix)
    factor = covariance_factor(model.gamma)

    def replicate(index: int) -> ReplicateSummary:
        sums = draw(model, mix, plan.n_per_sample, replicate_rng(plan.seed, index), factor).sum(axis=1)
        quantiles = np.quantile(sums, plan.levels) if plan.levels else np.empty(0)
        cumulants = {}
        if sums.size >= 2:
            cumulants = {order: univariate_sample_cumulant(sums, order) for order in REPLICATE_ORDERS}
        maxima = block_maxima_ecdf(sums, plan.block).maxima if plan.block else None
        return ReplicateSummary(index, np.asarray(quantiles), cumulants, maxima)

    logger.info(f"[SIM] Монте-Карло: {plan.n_replicates} реплик по {plan.n_per_sample} наблюдений, seed={plan.seed}")
    replicates = map_replicates(replicate, plan.n_replicates, workers)
    logger.info("[SIM] Реплики посчитаны")
    return MonteCarloResult(plan, replicates)


def quantile_bands(result: MonteCarloResult, observed=None) -> QuantileBands:
    """Полосы по уже посчитанным репликам"""
    plan = result.plan
    matrix = result.quantile_matrix()
    low, high = plan.band_quantiles
    lower = np.quantile(matrix, low, axis=0)
    upper = np.quantile(matrix, high, axis=0)
    observed_quantiles = None
    if observed is not None:
        observed_quantiles = np.quantile(_row_sums(observed), plan.levels)
    return QuantileBands(list(plan.levels), lower, upper, plan.band_probability, observed_quantiles)


def monte_carlo_bands(model: EllipticalCgf, mix: GammaMixture, plan: SimulationPlan, observed=None,
                      workers: Optional[int] = None, logger: Optional[logging.Logger] = None) -> QuantileBands:
    """
    Для каждой реплики - квантили суммы строк; полосы - эмпирические квантили
    (1-p)/2 и (1+p)/2 по репликам. observed - наблюдаемая матрица данных.
    """
    if not plan.levels:
        raise DomainError("Не заданы уровни квантилей")
    return quantile_bands(run_monte_carlo(model, mix, plan, workers, logger), observed)


def maxima_bands(result: MonteCarloResult, observed=None) -> BlockMaximaBands:
    plan = result.plan
    if not plan.block:
        raise DomainError("Размер блока не задан")
    pooled = [r.maxima for r in result.replicates]
    observed_ecdf = None
    if observed is not None:
        observed_ecdf = block_maxima_ecdf(_row_sums(observed), plan.block)
        pooled.append(observed_ecdf.maxima)
    pooled = np.concatenate(pooled)
    grid = np.linspace(pooled.min(), pooled.max(), GRID_POINTS)
    curves = np.vstack([BlockMaximaEcdf(r.maxima)(grid) for r in result.replicates])
    low, high = plan.band_quantiles
    return BlockMaximaBands(
        grid,
        np.quantile(curves, low, axis=0),
        np.quantile(curves, high, axis=0),
        observed_ecdf(grid) if observed_ecdf is not None else None,
    )


def block_maxima_bands(model: EllipticalCgf, mix: GammaMixture, plan: SimulationPlan, observed=None,
                       workers: Optional[int] = None, logger: Optional[logging.Logger] = None) -> BlockMaximaBands:
    """Поточечные полосы ЭФР блочных максимумов суммы на фиксированной сетке"""
    return maxima_bands(run_monte_carlo(model, mix, plan, workers, logger), observed)


@dataclass
class GroupStatistics:
    """Оценки Монте-Карло (среднее по репликам и его стандартная ошибка)"""
    covariance: dict
    cumulants: dict

    def to_dict(self) -> dict:
        return {
            'covariance': {f'{a}-{b}': list(v) for (a, b), v in self.covariance.items()},
            'cumulants': {f'{g}-{order}': list(v) for (g, order), v in self.cumulants.items()},
        }


def _mean_and_error(values: Sequence[float]):
    values = np.asarray(values, dtype=float)
    error = values.std(ddof=1) / math.sqrt(values.size) if values.size > 1 else math.nan
    return float(values.mean()), float(error)


def group_statistics(model: EllipticalCgf, mix: GammaMixture, agg: AggregationMap, plan: SimulationPlan,
                     orders: Sequence[int] = (2, 4), workers: Optional[int] = None,
                     logger: Optional[logging.Logger] = None) -> GroupStatistics:
    """cov(Z_a, Z_b) и кумулянты групповых сумм Z_g по репликам"""
    logger = logger or get_logger()
    check_mixture(model, mix)
    factor = covariance_factor(model.gamma)
    indicator = agg.indicator()

    def replicate(index: int):
        groups = draw(model, mix, plan.n_per_sample, replicate_rng(plan.seed, index), factor) @ indicator
        covariance = np.cov(groups, rowvar=False, bias=True) if len(agg) > 1 else None
        cumulants = {
            (g, order): univariate_sample_cumulant(groups[:, g], order)
            for g in range(len(agg)) for order in orders
        }
        return covariance, cumulants

    results = map_replicates(replicate, plan.n_replicates, workers)
    covariance = {}
    for a in range(len(agg)):
        for b in range(a + 1, len(agg)):
            covariance[(a, b)] = _mean_and_error([r[0][a, b] for r in results])
    cumulants = {key: _mean_and_error([r[1][key] for r in results]) for key in results[0][1]}
    logger.info(f"[SIM] Групповые статистики по {plan.n_replicates} репликам для {len(agg)} групп")
    return GroupStatistics(covariance, cumulants)


def _row_sums(observed) -> np.ndarray:
    observed = np.asarray(observed, dtype=float)
    return observed.sum(axis=1) if observed.ndim == 2 else observed
