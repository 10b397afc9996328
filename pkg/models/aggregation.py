"""
Агрегирование модели: CGF групповых сумм и их аналитические кумулянты
"""

import math
from typing import Iterable

from models.cgf import AggregatedCgf, AggregationMap, EllipticalCgf, _checked_subset
from utils.errors import DomainError


def aggregate_cgf(model: EllipticalCgf, agg: AggregationMap) -> AggregatedCgf:
    """CGF вектора (sum_{j in I_1} X_j, ..., sum_{j in I_l} X_j)"""
    return AggregatedCgf(model, agg)


def block_sum(model: EllipticalCgf, set_a: Iterable[int], set_b: Iterable[int]) -> float:
    """sum_{i in A} sum_{j in B} Γ_ij"""
    a = _checked_subset(set_a, model.dimension)
    b = _checked_subset(set_b, model.dimension)
    return math.fsum(float(model.gamma[i, j]) for i in a for j in b)


def sum_cumulants(model: EllipticalCgf, subset: Iterable[int], order: int) -> float:
    """
    Кумулянт порядка order суммы компонент subset.

    Нечётные порядки >= 3 равны нулю, порядок 2r равен
    (c_r / r!) (2r)! / 2^r · T^r, где T = sum_{i,j in subset} Γ_ij.
    Порядок 1 - сумма средних.
    """
    index = _checked_subset(subset, model.dimension)
    if order < 1:
        raise DomainError(f"Порядок кумулянта должен быть >= 1, получено {order}")
    if order == 1:
        return math.fsum(float(model.m[j]) for j in index)
    if order % 2:
        return 0.0
    r = order // 2
    c = model.coefficient(r)
    total = block_sum(model, index, index)
    return c / math.factorial(r) * math.factorial(2 * r) / 2 ** r * total ** r


def group_cov(model: EllipticalCgf, set_a: Iterable[int], set_b: Iterable[int],
              printed: bool = False) -> float:
    """
    cov(Z_A, Z_B) = c_1 · sum_{i in A, j in B} Γ_ij.

    printed=True - вариант с множителем c_1/2 (расходится с билинейностью
    ковариации, оставлен для сравнения в отчёте).
    """
    a = set(_checked_subset(set_a, model.dimension))
    b = set(_checked_subset(set_b, model.dimension))
    if a & b:
        raise DomainError(f"Группы пересекаются по индексам {sorted(a & b)}")
    factor = 0.5 if printed else 1.0
    return factor * model.coefficient(1) * block_sum(model, a, b)


def group_cumulants(model: EllipticalCgf, group: Iterable[int], order: int,
                    printed: bool = False) -> float:
    """
    Кумулянт порядка order групповой суммы.

    По умолчанию совпадает с sum_cumulants. printed=True считает
    (2r-1)! c_r (R/2)^r с R = 2·sum Γ_ii + 4·sum_{i<j} Γ_ij. Он больше
    кумулянта суммы в (r-1)!·2^{r-1} раз, т.е. совпадает с ним только при r = 1.
    """
    if printed:
        index = _checked_subset(group, model.dimension)
        if order < 2 or order % 2:
            return sum_cumulants(model, index, order)
        r = order // 2
        diagonal = math.fsum(float(model.gamma[i, i]) for i in index)
        off_diagonal = math.fsum(
            float(model.gamma[i, j]) for pos, i in enumerate(index) for j in index[pos + 1:]
        )
        spread = 2.0 * diagonal + 4.0 * off_diagonal
        return math.factorial(2 * r - 1) * model.coefficient(r) * (spread / 2.0) ** r
    return sum_cumulants(model, group, order)
