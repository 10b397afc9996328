"""
Квантили Корниша-Фишера четвёртого порядка
"""

import math
from typing import Sequence

from scipy import stats

from utils.errors import DomainError


def cornish_fisher_quantile(kappa: Sequence[float], p: float) -> float:
    """
    κ1 + √κ2 [z + (z²-1)γ1/6 + (z³-3z)γ2/24 - (2z³-5z)γ1²/36], z = Φ^-1(p).

    Args:
        kappa: (κ1, κ2, κ3, κ4); недостающие старшие кумулянты считаются нулевыми
        p: вероятность из (0, 1)
    """
    values = list(kappa) + [0.0] * (4 - len(kappa))
    k1, k2, k3, k4 = (float(v) for v in values[:4])
    if k2 <= 0:
        raise DomainError(f"κ2={k2} должен быть положительным")
    if not 0.0 < p < 1.0:
        raise DomainError(f"Вероятность {p} вне (0, 1)")
    z = float(stats.norm.ppf(p))
    g1 = k3 / k2 ** 1.5
    g2 = k4 / k2 ** 2
    w = (z
         + (z ** 2 - 1.0) * g1 / 6.0
         + (z ** 3 - 3.0 * z) * g2 / 24.0
         - (2.0 * z ** 3 - 5.0 * z) * g1 ** 2 / 36.0)
    return k1 + math.sqrt(k2) * w
