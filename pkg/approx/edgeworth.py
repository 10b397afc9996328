"""
Разложение Эджворта плотности (n = 1) вокруг φ_Γ
"""

from typing import Optional, Union

import numpy as np
from scipy import stats

from approx.hermite import contract_hermite, precision_matrix
from cumulants.algebra import CumulantTensor
from models.cgf import EllipticalCgf
from utils.errors import DomainError

TensorLike = Union[CumulantTensor, np.ndarray]


def _dense(tensor: TensorLike, dimension: int, order: int) -> np.ndarray:
    array = tensor.to_dense() if isinstance(tensor, CumulantTensor) else np.asarray(tensor, dtype=float)
    if array.shape != (dimension,) * order:
        raise DomainError(f"Тензор формы {array.shape}, ожидался {(dimension,) * order}")
    return array


def edgeworth_density(x, gamma, kappa3: TensorLike, kappa4: Optional[TensorLike] = None):
    """
    φ_Γ(x) {1 + (1/6) κ3·h3 + (1/24) κ4·h4 + (1/72) (κ3⊗κ3)·h6}.

    Среднее считается нулевым (центрирует вызывающий). Без kappa4 остаётся
    только поправка третьего порядка. В хвостах значение может быть
    отрицательным - это свойство разложения, а не ошибка.

    Args:
        x: точка (J,) или пачка точек (n, J)
    """
    gamma = np.atleast_2d(np.asarray(gamma, dtype=float))
    precision = precision_matrix(gamma)
    dimension = gamma.shape[0]
    x = np.asarray(x, dtype=float)
    single = x.ndim == 0 or (x.ndim == 1 and x.size == dimension)
    if single:
        points = x.reshape(1, dimension)
    elif x.ndim == 1 and dimension == 1:
        points = x[:, None]
    else:
        points = x
    if points.ndim != 2 or points.shape[1] != dimension:
        raise DomainError(f"Точки формы {x.shape} при размерности {dimension}")

    k3 = _dense(kappa3, dimension, 3)
    correction = 1.0 + contract_hermite([k3], points, precision) / 6.0
    if kappa4 is not None:
        k4 = _dense(kappa4, dimension, 4)
        correction += contract_hermite([k4], points, precision) / 24.0
        if np.any(k3):
            correction += contract_hermite([k3, k3], points, precision) / 72.0

    base = stats.multivariate_normal(mean=np.zeros(dimension), cov=gamma).pdf(points)
    density = np.atleast_1d(base) * correction
    return float(density[0]) if single else density


def model_edgeworth_density(model: EllipticalCgf, x):
    """Эджворт для эллиптической модели: ковариация c_1 Γ, κ3 = 0, κ4 из модели при R >= 2"""
    covariance = model.coefficient(1) * model.gamma
    kappa3 = np.zeros((model.dimension,) * 3)
    kappa4 = model.cumulant_tensor(4) if model.n_coeffs >= 2 else None
    return edgeworth_density(np.asarray(x, dtype=float) - model.m, covariance, kappa3, kappa4)
