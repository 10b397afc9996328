"""
τ-b Кендалла (scipy.stats.kendalltau) с проверками области определения
"""

import math
from typing import Sequence

import numpy as np
from scipy import stats

from utils.errors import DomainError


def kendall_tau(x: Sequence[float], y: Sequence[float]) -> float:
    """
    τ-b с поправкой на связи.

    Raises:
        DomainError: разные длины, n < 2, NaN/Inf или постоянный вектор (τ не определён)
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError(f"Векторы разной формы: {x.shape} и {y.shape}")
    if x.size < 2:
        raise DomainError("Для τ Кендалла нужно хотя бы 2 наблюдения")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DomainError("τ Кендалла не определён для NaN/Inf")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise DomainError("τ Кендалла не определён: один из векторов постоянен")

    tau = float(stats.kendalltau(x, y, variant='b').statistic)
    if math.isnan(tau):
        raise DomainError("τ Кендалла не определён")
    return min(1.0, max(-1.0, tau))
