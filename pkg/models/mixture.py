"""
Модель данных смешивающей переменной V
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy import special

from cumulants.algebra import univariate_moments_to_cumulants
from utils.errors import DomainError


@dataclass
class GammaMixture:
    """
    Смесь гамма-распределений для V > 0 в конструкции Y = m + sqrt(V) X.

    Если point_mass задан, V вырождена (V = point_mass), компоненты пусты:
    так представляется гауссовская модель (V = 1).
    """
    weights: List[float] = field(default_factory=list)
    shapes: List[float] = field(default_factory=list)
    scales: List[float] = field(default_factory=list)
    point_mass: Optional[float] = None

    def __post_init__(self):
        self.weights = [float(w) for w in self.weights]
        self.shapes = [float(k) for k in self.shapes]
        self.scales = [float(s) for s in self.scales]
        if self.point_mass is not None:
            self.point_mass = float(self.point_mass)
            if self.point_mass <= 0:
                raise DomainError(f"Вырожденная V должна быть положительной, получено {self.point_mass}")
            if self.weights:
                raise DomainError("Вырожденная смесь не должна иметь компонент")
            return
        if not (len(self.weights) == len(self.shapes) == len(self.scales)) or not self.weights:
            raise DomainError("Смесь должна иметь хотя бы одну компоненту с весом, формой и масштабом")
        if any(w <= 0 for w in self.weights):
            raise DomainError("Веса смеси должны быть положительны")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise DomainError(f"Веса смеси суммируются в {sum(self.weights)!r}, а не в 1")
        if any(k <= 0 for k in self.shapes) or any(s <= 0 for s in self.scales):
            raise DomainError("Формы и масштабы смеси должны быть положительны")

    @classmethod
    def degenerate(cls, value: float = 1.0) -> 'GammaMixture':
        """V = value почти наверное"""
        return cls(point_mass=value)

    @classmethod
    def single(cls, shape: float, scale: float) -> 'GammaMixture':
        return cls([1.0], [shape], [scale])

    @property
    def n_components(self) -> int:
        return len(self.weights)

    def raw_moment(self, r: int) -> float:
        """E(V^r) = sum_k w_k scale_k^r Gamma(shape_k + r)/Gamma(shape_k)"""
        if self.point_mass is not None:
            return self.point_mass ** r
        return float(sum(
            w * s ** r * special.poch(k, r)
            for w, k, s in zip(self.weights, self.shapes, self.scales)
        ))

    def cumulants(self, order: int) -> Tuple[float, ...]:
        """kappa_1..kappa_order смеси: моменты смешиваются линейно, затем переводятся в кумулянты"""
        return univariate_moments_to_cumulants([self.raw_moment(r) for r in range(1, order + 1)])

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.point_mass is not None:
            return np.full(n, self.point_mass)
        component = rng.choice(self.n_components, size=n, p=np.asarray(self.weights) / sum(self.weights))
        shapes = np.asarray(self.shapes)[component]
        scales = np.asarray(self.scales)[component]
        return rng.gamma(shapes, scales)

    def to_dict(self) -> dict:
        return {
            'weights': list(self.weights),
            'shapes': list(self.shapes),
            'scales': list(self.scales),
            'point_mass': self.point_mass,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'GammaMixture':
        return cls(
            weights=data.get('weights') or [],
            shapes=data.get('shapes') or [],
            scales=data.get('scales') or [],
            point_mass=data.get('point_mass'),
        )
