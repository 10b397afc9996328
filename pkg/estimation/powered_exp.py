"""
Степенно-экспоненциальная ковариационная функция и построение Γ по координатам станций
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from utils.errors import DomainError


@dataclass(frozen=True)
class PoweredExpParams:
    """θ1 > 0 (радиус), 0 < θ2 <= 2, σ0² >= 0 (наггет), σ1² >= 0 (порог)"""
    theta1: float
    theta2: float
    sigma0_sq: float = 0.0
    sigma1_sq: float = 1.0

    def __post_init__(self):
        if not self.theta1 > 0:
            raise DomainError(f"θ1={self.theta1} должно быть > 0")
        if not 0 < self.theta2 <= 2:
            raise DomainError(f"θ2={self.theta2} должно быть в (0, 2]")
        if self.sigma0_sq < 0 or self.sigma1_sq < 0:
            raise DomainError(f"σ0²={self.sigma0_sq}, σ1²={self.sigma1_sq} должны быть >= 0")

    @classmethod
    def from_dict(cls, data: dict) -> 'PoweredExpParams':
        return cls(
            theta1=float(data['theta1']),
            theta2=float(data['theta2']),
            sigma0_sq=float(data.get('sigma0_sq', 0.0)),
            sigma1_sq=float(data.get('sigma1_sq', 1.0)),
        )


def powered_exp_cov(d, p: PoweredExpParams):
    """σ0² I(d = 0) + σ1² exp(-(d/θ1)^θ2)"""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise DomainError("Расстояние должно быть неотрицательным")
    value = p.sigma1_sq * np.exp(-(d / p.theta1) ** p.theta2) + p.sigma0_sq * (d == 0)
    return float(value) if value.ndim == 0 else value


def build_gamma(locations: Sequence[Tuple[float, float]], p: PoweredExpParams) -> np.ndarray:
    """Γ_ij = C(|s_i - s_j|) по попарным евклидовым расстояниям"""
    points = np.asarray(locations, dtype=float)
    if points.ndim != 2 or points.shape[0] == 0:
        raise DomainError(f"Ожидался список координат, получено {points.shape}")
    gamma = powered_exp_cov(cdist(points, points), p)
    return 0.5 * (gamma + gamma.T)
