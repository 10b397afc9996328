"""
Вероятности хвоста маргиналей модели численным интегрированием седловой плотности
"""

import logging
import math
from itertools import product
from typing import Iterable, Optional, Sequence

import numpy as np

from approx.saddlepoint import lugannani_rice_tail, saddlepoint_density
from models.cgf import EllipticalCgf
from utils.errors import ConvergenceError, DomainError, QuadratureError
from utils.logger import get_logger

MAX_TAIL_DIMENSION = 5
# (грубая, точная) сетки Гаусса-Лежандра по размерности
TAIL_NODES = {1: (48, 64), 2: (24, 32), 3: (12, 16), 4: (8, 10), 5: (6, 8)}
TRUNCATION_RATIO = 1e-6
START_SPREAD = 6.0
MAX_SPREAD = 40.0


def _box_integral(marginal: EllipticalCgf, lower: np.ndarray, upper: np.ndarray, nodes: int) -> float:
    base, weights = np.polynomial.legendre.leggauss(nodes)
    half = 0.5 * (upper - lower)
    mid = 0.5 * (upper + lower)
    axes = [mid[j] + half[j] * base for j in range(marginal.dimension)]
    scale = float(np.prod(half))
    total = []
    previous = None
    for position in product(range(nodes), repeat=marginal.dimension):
        point = np.array([axes[j][position[j]] for j in range(marginal.dimension)])
        # соседний узел - хорошее начальное приближение для Ньютона
        try:
            density, solution = saddlepoint_density(marginal, point, start=previous)
        except ConvergenceError:
            density, solution = saddlepoint_density(marginal, point)
        previous = solution.lam
        total.append(density * math.prod(weights[i] for i in position))
    return scale * math.fsum(total)


def _truncated_mass(marginal: EllipticalCgf, upper: np.ndarray) -> float:
    # объединение событий {Y_j > u_j}: сумма одномерных хвостов - верхняя граница
    return math.fsum(
        lugannani_rice_tail(marginal.marginal([j]), upper[j]) for j in range(marginal.dimension)
    )


def tail_prob_marginal(model: EllipticalCgf, subset: Iterable[int], thresholds: Sequence[float],
                       tolerance: float = 1e-3, logger: Optional[logging.Logger] = None) -> float:
    """
    P(Y_j >= t_j для всех j из subset) по седловой плотности маргинали.

    Верхняя граница m_j + k σ_j увеличивается, пока отброшенная масса не
    станет меньше 1e-6 от оценки. Сетки Гаусса-Лежандра двух размеров
    должны согласоваться с относительной точностью tolerance.

    Raises:
        QuadratureError: сетки расходятся
    """
    logger = logger or get_logger()
    marginal = model.marginal(subset)
    dimension = marginal.dimension
    if dimension > MAX_TAIL_DIMENSION:
        raise DomainError(f"Интегрирование хвоста допустимо для |subset| <= {MAX_TAIL_DIMENSION}")
    lower = np.atleast_1d(np.asarray(thresholds, dtype=float))
    if lower.shape != (dimension,):
        raise DomainError(f"Ожидалось {dimension} порогов, получено {lower.size}")

    sigma = np.sqrt(np.diag(marginal.hessian(np.zeros(dimension))))
    coarse_nodes, fine_nodes = TAIL_NODES[dimension]
    spread = START_SPREAD
    while True:
        upper = np.maximum(marginal.m + spread * sigma, lower + sigma)
        truncated = _truncated_mass(marginal, upper)
        fine = _box_integral(marginal, lower, upper, fine_nodes)
        if truncated <= TRUNCATION_RATIO * max(fine, 0.0) or spread >= MAX_SPREAD:
            break
        spread += 2.0
        logger.debug(f"[APPROX] Хвост: отброшено {truncated:.3e}, расширяю границу до {spread:.0f}σ")

    coarse = _box_integral(marginal, lower, upper, coarse_nodes)
    if abs(fine - coarse) > tolerance * max(abs(fine), 1e-300):
        raise QuadratureError(coarse, fine, tolerance)
    logger.debug(f"[APPROX] Хвост: {fine:.6g} (граница {spread:.0f}σ, отброшено {truncated:.3e})")
    return fine
