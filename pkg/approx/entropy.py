"""
Приближение дифференциальной энтропии через третьи кумулянты

H ≈ H(φ_Γ) - (1/12) {sum (κ^jjj)² + 3 sum_{i≠j} (κ^iij)² + w sum_{i<j<k} (κ^ijk)²}
по тензору κ3, приведённому к Γ = I. Вес w = 6 даёт квадрат нормы
Фробениуса тензора и совпадает с квадратурой; w = 1/6 - печатный вариант.
"""

import math
from itertools import combinations, permutations
from typing import Union

import numpy as np

from approx.edgeworth import edgeworth_density
from approx.hermite import precision_matrix
from cumulants.algebra import CumulantTensor
from utils.errors import DomainError, QuadratureError

ENTROPY_WEIGHTS = {
    'corrected': 6.0,
    'printed': 1.0 / 6.0,
}


def gaussian_entropy(gamma) -> float:
    """½ log det Γ + (J/2) log 2π + J/2"""
    gamma = np.atleast_2d(np.asarray(gamma, dtype=float))
    precision_matrix(gamma)
    sign, logdet = np.linalg.slogdet(gamma)
    if sign <= 0:
        raise DomainError("Γ не положительно определена")
    dimension = gamma.shape[0]
    return 0.5 * logdet + 0.5 * dimension * math.log(2.0 * math.pi) + 0.5 * dimension


def whiten_third_cumulants(gamma, kappa3: Union[CumulantTensor, np.ndarray]) -> np.ndarray:
    """κ3 в координатах L^-1 x, где Γ = L Lᵀ"""
    gamma = np.atleast_2d(np.asarray(gamma, dtype=float))
    precision_matrix(gamma)
    dense = kappa3.to_dense() if isinstance(kappa3, CumulantTensor) else np.asarray(kappa3, dtype=float)
    if dense.shape != (gamma.shape[0],) * 3:
        raise DomainError(f"Тензор κ3 формы {dense.shape} при Γ {gamma.shape}")
    inverse = np.linalg.inv(np.linalg.cholesky(gamma))
    return np.einsum('ia,jb,kc,abc->ijk', inverse, inverse, inverse, dense)


def entropy_approx(gamma, kappa3: Union[CumulantTensor, np.ndarray], variant: str = 'corrected') -> float:
    """Энтропия по формуле с весами {1, 3, w}; variant - 'corrected' или 'printed'"""
    if variant not in ENTROPY_WEIGHTS:
        raise DomainError(f"Неизвестный вариант весов энтропии: {variant}")
    white = whiten_third_cumulants(gamma, kappa3)
    dimension = white.shape[0]
    diagonal = sum(white[j, j, j] ** 2 for j in range(dimension))
    paired = sum(white[i, i, j] ** 2 for i, j in permutations(range(dimension), 2))
    distinct = sum(white[i, j, k] ** 2 for i, j, k in combinations(range(dimension), 3))
    penalty = diagonal + 3.0 * paired + ENTROPY_WEIGHTS[variant] * distinct
    return gaussian_entropy(gamma) - penalty / 12.0


def entropy_quadrature(gamma, kappa3: Union[CumulantTensor, np.ndarray], nodes: int = 80,
                       width: float = 8.0, tolerance: float = 1e-6) -> float:
    """
    -∫ f log f для одночленной плотности Эджворта f по сетке Гаусса-Лежандра.

    Интегрирование идёт в координатах L^-1 x (якобиан det L); точки, где f <= 0,
    не дают вклада. Размерность не больше 3.

    Raises:
        QuadratureError: оценки на nodes и 2·nodes узлах расходятся больше tolerance
    """
    gamma = np.atleast_2d(np.asarray(gamma, dtype=float))
    dimension = gamma.shape[0]
    if dimension > 3:
        raise DomainError(f"Квадратурная энтропия только для J <= 3, получено {dimension}")
    white = whiten_third_cumulants(gamma, kappa3)
    log_jacobian = 0.5 * np.linalg.slogdet(gamma)[1]

    def estimate(count: int) -> float:
        base, weights = np.polynomial.legendre.leggauss(count)
        base = base * width
        weights = weights * width
        grids = np.meshgrid(*([base] * dimension), indexing='ij')
        points = np.stack([g.ravel() for g in grids], axis=1)
        weight = np.ones(points.shape[0])
        for w in np.meshgrid(*([weights] * dimension), indexing='ij'):
            weight = weight * w.ravel()
        density = edgeworth_density(points, np.eye(dimension), white)
        positive = density > 0
        integrand = np.zeros_like(density)
        integrand[positive] = density[positive] * np.log(density[positive])
        return float(-(weight @ integrand)) + log_jacobian

    coarse = estimate(nodes)
    fine = estimate(2 * nodes)
    if abs(fine - coarse) > tolerance * max(1.0, abs(fine)):
        raise QuadratureError(coarse, fine, tolerance)
    return fine
