"""
Робастная оценка ковариации через τ Кендалла: R_ij = sin(π τ_ij / 2), Γ = Σ^½ R Σ^½
"""

import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from estimation.kendall import kendall_tau
from utils.errors import DomainError
from utils.logger import get_logger

MIN_OBSERVATIONS = 10


@dataclass
class CovarianceEstimate:
    """Γ̂, матрица R̂ до проекции, выборочные дисперсии и норма Фробениуса поправки до PSD"""
    gamma: np.ndarray
    correlation: np.ndarray
    variances: np.ndarray
    psd_adjustment: float

    def to_dict(self) -> dict:
        return {
            'correlation': [float(v) for v in self.correlation.ravel()],
            'variances': [float(v) for v in self.variances],
            'psd_adjustment': self.psd_adjustment,
        }


def nearest_psd(matrix: np.ndarray):
    """Проекция симметричной матрицы на PSD обрезкой отрицательных собственных чисел"""
    eigenvalues, vectors = np.linalg.eigh(matrix)
    if eigenvalues[0] >= 0:
        return matrix, 0.0
    projected = (vectors * np.clip(eigenvalues, 0.0, None)) @ vectors.T
    projected = 0.5 * (projected + projected.T)
    return projected, float(np.linalg.norm(projected - matrix))


def kendall_correlation(data: np.ndarray) -> np.ndarray:
    """R̂ с R̂_ii = 1"""
    dimension = data.shape[1]
    correlation = np.eye(dimension)
    for i, j in combinations(range(dimension), 2):
        value = math.sin(0.5 * math.pi * kendall_tau(data[:, i], data[:, j]))
        correlation[i, j] = correlation[j, i] = value
    return correlation


def estimate_covariance(data, columns: Optional[Sequence[str]] = None,
                        logger: Optional[logging.Logger] = None) -> CovarianceEstimate:
    """
    Шаг 1 подгонки: Γ̂ по τ Кендалла и выборочным дисперсиям (ddof=1).

    Raises:
        DomainError: меньше 10 наблюдений или постоянный столбец
    """
    logger = logger or get_logger()
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise DomainError(f"Ожидалась матрица n×J, получено {data.shape}")
    n, dimension = data.shape
    names = list(columns) if columns is not None else [str(j) for j in range(dimension)]
    if n < MIN_OBSERVATIONS:
        raise DomainError(f"Для оценки ковариации нужно >= {MIN_OBSERVATIONS} наблюдений, получено {n}")
    for j in range(dimension):
        if np.all(data[:, j] == data[0, j]):
            raise DomainError(f"Столбец '{names[j]}' постоянен")

    variances = data.var(axis=0, ddof=1)
    correlation = kendall_correlation(data)
    scale = np.sqrt(variances)
    gamma = scale[:, None] * correlation * scale[None, :]
    gamma, adjustment = nearest_psd(gamma)
    if adjustment > 0:
        logger.warning(f"[FIT] Γ̂ спроецирована на PSD, поправка по Фробениусу {adjustment:.3e}")
    logger.info(f"[FIT] Γ̂ оценена по τ Кендалла: n={n}, J={dimension}")
    return CovarianceEstimate(gamma, correlation, variances, adjustment)
