"""
Шаг 2 подгонки: коэффициенты c_r из выборочных кумулянтов суммы
"""

import logging
import math
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

from cumulants.algebra import MAX_ORDER, univariate_sample_cumulant
from utils.errors import DomainError
from utils.logger import get_logger


def check_orders(orders: Sequence[int]) -> Tuple[int, ...]:
    """Порядки должны быть чётными и идти подряд от 2: (2, 4, ..., 2R)"""
    orders = tuple(sorted(int(o) for o in orders))
    expected = tuple(range(2, 2 * len(orders) + 1, 2))
    if not orders or orders != expected:
        raise DomainError(f"Порядки {orders} должны быть чётными и подряд от 2")
    if orders[-1] > MAX_ORDER:
        raise DomainError(f"Порядок {orders[-1]} больше допустимого {MAX_ORDER}")
    return orders


def sum_sample_cumulants(data, orders: Sequence[int]) -> dict:
    """Plug-in кумулянты построчной суммы столбцов"""
    sums = np.asarray(data, dtype=float).sum(axis=1)
    return {order: univariate_sample_cumulant(sums, order) for order in orders}


def fit_coefficients(gamma, sample_sum_cumulants: Mapping[int, float], orders: Sequence[int],
                     logger: Optional[logging.Logger] = None) -> Tuple[float, ...]:
    """
    c_r = κ̂_{2r} · r! · 2^r / ((2r)! · T^r), T = sum Γ_ij.

    Точное обращение формулы кумулянта суммы, по одному кумулянту на коэффициент.
    """
    logger = logger or get_logger()
    orders = check_orders(orders)
    total = math.fsum(float(v) for v in np.asarray(gamma, dtype=float).ravel())
    if total <= 0:
        raise DomainError(f"T = sum Γ_ij = {total} должно быть положительным")
    coeffs = []
    for order in orders:
        if order not in sample_sum_cumulants:
            raise DomainError(f"Нет выборочного кумулянта порядка {order}")
        r = order // 2
        kappa = float(sample_sum_cumulants[order])
        coeffs.append(kappa * math.factorial(r) * 2 ** r / (math.factorial(2 * r) * total ** r))
    logger.info(f"[FIT] Коэффициенты c_r: {', '.join(f'{c:.6g}' for c in coeffs)} (T={total:.6g})")
    return tuple(coeffs)
