"""
Модуль для меры аддитивного взаимодействия Ланкастера

Мера Delta F(x) = sum_pi w(pi) F_pi(x), где F_pi - произведение маргинальных
функций распределения по блокам разбиения. Интеграл меры по R^J даёт совместный
кумулянт с множителем (-1)^J.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import special, stats

from cumulants.partitions import SetPartition, enumerate_partitions, mobius_weight
from utils.errors import DomainError, QuadratureError
from utils.logger import get_logger

MAX_POINTWISE_DIMENSION = 6
MAX_INTEGRAL_DIMENSION = 3
MIN_GRID_NODES = 8

Subset = Tuple[int, ...]


class MarginalOracle:
    """
    Маргинальные функции распределения случайного вектора размерности J.

    cdf(subset, points) принимает отсортированный набор индексов и массив
    точек формы (m, len(subset)), возвращает массив (m,) значений
    P(X_j <= x_j для всех j из subset). Реализации не хранят изменяемого
    состояния и могут вызываться из нескольких потоков.
    """

    def __init__(self, dimension: int):
        self.dimension = dimension

    def cdf(self, subset: Subset, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _check(self, subset: Subset, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != len(subset):
            raise DomainError(f"Точки размерности {points.shape[1]} для подмножества {subset}")
        return points


class FunctionOracle(MarginalOracle):
    """Оракул из произвольной функции fn(subset, points) -> values"""

    def __init__(self, dimension: int, fn: Callable[[Subset, np.ndarray], np.ndarray]):
        super().__init__(dimension)
        self.fn = fn

    def cdf(self, subset, points):
        points = self._check(subset, points)
        return np.asarray(self.fn(tuple(subset), points), dtype=float)


class ProductOracle(MarginalOracle):
    """
    Разложимое распределение: независимые группы координат.

    Args:
        factors: список (индексы группы, оракул размерности len(группы))
    """

    def __init__(self, factors: Sequence[Tuple[Sequence[int], MarginalOracle]]):
        groups = [tuple(group) for group, _ in factors]
        dimension = sum(len(group) for group in groups)
        if sorted(i for group in groups for i in group) != list(range(dimension)):
            raise DomainError(f"Группы {groups} не разбивают 0..{dimension - 1}")
        super().__init__(dimension)
        self.factors = [(group, oracle) for group, (_, oracle) in zip(groups, factors)]

    def cdf(self, subset, points):
        points = self._check(subset, points)
        values = np.ones(points.shape[0])
        for group, oracle in self.factors:
            local = [(group.index(j), position) for position, j in enumerate(subset) if j in group]
            if not local:
                continue
            local.sort()
            values *= oracle.cdf(tuple(k for k, _ in local), points[:, [p for _, p in local]])
        return values


def bivariate_normal_cdf(h: np.ndarray, k: np.ndarray, rho: float) -> np.ndarray:
    """P(Z1 <= h, Z2 <= k) для стандартных нормальных с корреляцией rho (через T-функцию Оуэна)"""
    h = np.asarray(h, dtype=float)
    k = np.asarray(k, dtype=float)
    if abs(rho) >= 1.0:
        return stats.norm.cdf(np.minimum(h, k)) if rho > 0 else np.maximum(stats.norm.cdf(h) + stats.norm.cdf(k) - 1.0, 0.0)
    scale = math.sqrt(1.0 - rho * rho)
    # сдвиг от нуля, чтобы не делить на h=0 или k=0
    h = np.where(h == 0.0, 1e-300, h)
    k = np.where(k == 0.0, 1e-300, k)
    ah = (k - rho * h) / (h * scale)
    ak = (h - rho * k) / (k * scale)
    beta = np.where(h * k > 0, 0.0, np.where(h * k < 0, 0.5, np.where(h + k >= 0, 0.0, 0.5)))
    values = 0.5 * (stats.norm.cdf(h) + stats.norm.cdf(k)) - special.owens_t(h, ah) - special.owens_t(k, ak) - beta
    return np.clip(values, 0.0, 1.0)


class GaussianOracle(MarginalOracle):
    """Многомерное нормальное распределение N(mean, cov)"""

    def __init__(self, mean: Sequence[float], cov: np.ndarray):
        self.mean = np.asarray(mean, dtype=float)
        self.cov = np.asarray(cov, dtype=float)
        super().__init__(len(self.mean))

    def cdf(self, subset, points):
        points = self._check(subset, points)
        subset = list(subset)
        sd = np.sqrt(np.diag(self.cov)[subset])
        z = (points - self.mean[subset]) / sd
        if len(subset) == 1:
            return stats.norm.cdf(z[:, 0])
        if len(subset) == 2:
            rho = self.cov[subset[0], subset[1]] / (sd[0] * sd[1])
            return bivariate_normal_cdf(z[:, 0], z[:, 1], rho)
        sub_cov = self.cov[np.ix_(subset, subset)]
        return np.atleast_1d(stats.multivariate_normal(self.mean[subset], sub_cov).cdf(points))


class GaussianMixtureOracle(MarginalOracle):
    """
    Смесь нормальных распределений с независимыми координатами внутри компоненты.

    Подходит для моделей с общим шоком: X_j = Z_j + a*B, B - бернуллиевская.
    """

    def __init__(self, weights: Sequence[float], means: np.ndarray, sds: np.ndarray):
        self.weights = np.asarray(weights, dtype=float)
        self.means = np.atleast_2d(np.asarray(means, dtype=float))
        self.sds = np.atleast_2d(np.asarray(sds, dtype=float))
        if not np.isclose(self.weights.sum(), 1.0):
            raise DomainError("Веса смеси не суммируются в 1")
        super().__init__(self.means.shape[1])

    def cdf(self, subset, points):
        points = self._check(subset, points)
        subset = list(subset)
        values = np.zeros(points.shape[0])
        for weight, mean, sd in zip(self.weights, self.means, self.sds):
            values += weight * np.prod(stats.norm.cdf((points - mean[subset]) / sd[subset]), axis=1)
        return values


class EmpiricalOracle(MarginalOracle):
    """Эмпирическая функция распределения: F(x) = (1/n) sum 1{все координаты <= x}"""

    def __init__(self, data: np.ndarray, budget: int = 20_000_000):
        self.data = np.asarray(data, dtype=float)
        if self.data.ndim != 2 or self.data.shape[0] == 0:
            raise DomainError("Пустая матрица данных для эмпирического оракула")
        self.budget = budget
        super().__init__(self.data.shape[1])

    def cdf(self, subset, points):
        points = self._check(subset, points)
        sample = self.data[:, list(subset)]
        values = np.empty(points.shape[0])
        chunk = max(1, self.budget // (sample.shape[0] * max(1, len(subset))))
        for start in range(0, points.shape[0], chunk):
            block = points[start:start + chunk]
            below = np.all(sample[None, :, :] <= block[:, None, :], axis=2)
            values[start:start + chunk] = below.mean(axis=1)
        return values


@dataclass
class GridSpec:
    """Тензорная сетка для квадратуры по прямоугольнику [lower, upper]"""
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    nodes: Tuple[int, ...]

    def __post_init__(self):
        self.lower = tuple(float(v) for v in self.lower)
        self.upper = tuple(float(v) for v in self.upper)
        self.nodes = tuple(int(v) for v in self.nodes)
        if not (len(self.lower) == len(self.upper) == len(self.nodes)):
            raise DomainError("Размерности границ и числа узлов не совпадают")
        for lo, hi, n in zip(self.lower, self.upper, self.nodes):
            if not lo < hi:
                raise DomainError(f"Нижняя граница {lo} не меньше верхней {hi}")
            if n < MIN_GRID_NODES:
                raise DomainError(f"Нужно хотя бы {MIN_GRID_NODES} узлов на ось, получено {n}")

    @property
    def dimension(self) -> int:
        return len(self.nodes)

    def refined(self) -> 'GridSpec':
        return GridSpec(self.lower, self.upper, tuple(2 * n for n in self.nodes))

    def midpoints(self) -> Tuple[np.ndarray, float]:
        """Центры ячеек (m, J) и объём ячейки"""
        axes = []
        volume = 1.0
        for lo, hi, n in zip(self.lower, self.upper, self.nodes):
            step = (hi - lo) / n
            axes.append(lo + step * (np.arange(n) + 0.5))
            volume *= step
        mesh = np.meshgrid(*axes, indexing='ij')
        return np.stack([axis.ravel() for axis in mesh], axis=1), volume


def partition_apply(oracle: MarginalOracle, p: SetPartition, x: np.ndarray) -> np.ndarray:
    """F_pi(x) = произведение маргинальных CDF по блокам разбиения (точка или массив точек)"""
    points = np.atleast_2d(np.asarray(x, dtype=float))
    if points.shape[1] != oracle.dimension or p.size != oracle.dimension:
        raise DomainError(f"Размерность точки {points.shape[1]}, разбиения {p.size}, оракула {oracle.dimension}")
    values = np.ones(points.shape[0])
    for block in p.blocks:
        values *= oracle.cdf(block, points[:, list(block)])
    return values if np.ndim(x) > 1 else float(values[0])


def lancaster_measure(oracle: MarginalOracle, x: np.ndarray) -> np.ndarray:
    """Delta F(x) = sum_pi (-1)^{|pi|-1}(|pi|-1)! F_pi(x)"""
    if oracle.dimension > MAX_POINTWISE_DIMENSION:
        raise DomainError(f"Мера Ланкастера считается для J <= {MAX_POINTWISE_DIMENSION}, J={oracle.dimension}")
    points = np.atleast_2d(np.asarray(x, dtype=float))
    total = np.zeros(points.shape[0])
    for p in enumerate_partitions(oracle.dimension):
        total += mobius_weight(p) * partition_apply(oracle, p, points)
    return total if np.ndim(x) > 1 else float(total[0])


def _midpoint_integral(oracle: MarginalOracle, grid: GridSpec) -> float:
    points, volume = grid.midpoints()
    return float(math.fsum(lancaster_measure(oracle, points)) * volume)


def cumulant_via_lancaster_integral(oracle: MarginalOracle, grid: GridSpec,
                                    tolerance: float = 1e-4, logger=None) -> float:
    """
    Совместный кумулянт (-1)^J * интеграл Delta F по сетке (при J=2 - формула Хёфдинга).

    Интеграл считается правилом средней точки на grid и на сетке с удвоенным
    числом узлов; расхождение больше tolerance * max(1, |I|) - ошибка.
    """
    logger = logger or get_logger()
    if not 2 <= oracle.dimension <= MAX_INTEGRAL_DIMENSION:
        raise DomainError(f"Интеграл меры Ланкастера реализован для 2 <= J <= {MAX_INTEGRAL_DIMENSION}, J={oracle.dimension}")
    if grid.dimension != oracle.dimension:
        raise DomainError("Размерность сетки не совпадает с размерностью оракула")

    sign = (-1) ** oracle.dimension
    coarse = sign * _midpoint_integral(oracle, grid)
    fine = sign * _midpoint_integral(oracle, grid.refined())
    logger.debug(f"[LANCASTER] сетка {grid.nodes}: {coarse:.8g}, измельчённая: {fine:.8g}")
    if abs(fine - coarse) > tolerance * max(1.0, abs(fine)):
        raise QuadratureError(coarse, fine, tolerance)
    return fine


def grid_from_data(data: np.ndarray, nodes: int = 32, margin: float = 0.0) -> GridSpec:
    """Сетка по диапазону данных (для эмпирического оракула вся масса внутри)"""
    data = np.asarray(data, dtype=float)
    lower = data.min(axis=0)
    upper = data.max(axis=0)
    span = np.where(upper > lower, upper - lower, 1.0)
    return GridSpec(tuple(lower - margin * span - 1e-9 * span), tuple(upper + margin * span), (nodes,) * data.shape[1])


def gaussian_grid(mean: Sequence[float], sd: Sequence[float], nodes: int = 64,
                  width: float = 8.0, extra: Optional[Sequence[float]] = None) -> GridSpec:
    """Сетка mean +- width*sd (хвостовая масса вне сетки пренебрежимо мала)"""
    mean = np.asarray(mean, dtype=float)
    sd = np.asarray(sd, dtype=float)
    shift = np.zeros_like(mean) if extra is None else np.asarray(extra, dtype=float)
    return GridSpec(tuple(mean - width * sd), tuple(mean + width * sd + shift), (nodes,) * len(mean))
