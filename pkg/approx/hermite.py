"""
Многомерные полиномы Эрмита h_{j1..jk}(x; Γ)

φ_Γ(x) h_{j1..jk}(x; Γ) = (-1)^k ∂^k φ_Γ / ∂x_j1 ... ∂x_jk.

Свёртки с тензорами кумулянтов идут по частичным паросочетаниям позиций:
пара даёт множитель -(Γ^-1)_ab, одиночная позиция - y = Γ^-1 x.
"""

import string
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from cumulants.partitions import enumerate_partitions
from utils.errors import DomainError

MAX_HERMITE_ORDER = 6
MAX_CONDITION = 1e12


def precision_matrix(gamma) -> np.ndarray:
    """Γ^-1 с проверкой обусловленности"""
    gamma = np.atleast_2d(np.asarray(gamma, dtype=float))
    if gamma.shape[0] != gamma.shape[1]:
        raise DomainError(f"Γ должна быть квадратной, получено {gamma.shape}")
    condition = np.linalg.cond(gamma)
    if not np.isfinite(condition) or condition >= MAX_CONDITION:
        raise DomainError(f"Γ вырождена или плохо обусловлена (cond={condition:.3e})")
    return np.linalg.inv(gamma)


class HermiteBasis:
    """
    Полиномы Эрмита в фиксированной точке x по рекурсии

    h_{idx ∪ {j}} = y_j h_idx - sum_m P[j, idx_m] h_{idx без idx_m}, P = Γ^-1, y = P x.
    """

    def __init__(self, x, gamma):
        self.precision = precision_matrix(gamma)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.precision.shape[0],):
            raise DomainError(f"Точка размерности {x.shape} при Γ {self.precision.shape}")
        self.y = self.precision @ x
        self._cache: Dict[Tuple[int, ...], float] = {(): 1.0}

    def __call__(self, idx: Iterable[int]) -> float:
        idx = tuple(sorted(int(j) for j in idx))
        if len(idx) > MAX_HERMITE_ORDER:
            raise DomainError(f"Порядок полинома Эрмита {len(idx)} больше {MAX_HERMITE_ORDER}")
        if idx and (idx[0] < 0 or idx[-1] >= self.y.size):
            raise DomainError(f"Индексы {idx} вне диапазона 0..{self.y.size - 1}")
        return self._value(idx)

    def _value(self, idx: Tuple[int, ...]) -> float:
        if idx in self._cache:
            return self._cache[idx]
        j, rest = idx[-1], idx[:-1]
        value = self.y[j] * self._value(rest)
        for m in range(len(rest)):
            value -= self.precision[j, rest[m]] * self._value(rest[:m] + rest[m + 1:])
        self._cache[idx] = value
        return value


def hermite_tensor(x, gamma, idx: Sequence[int]) -> float:
    """Значение h_{j1..jk}(x; Γ)"""
    return HermiteBasis(x, gamma)(idx)


@lru_cache(maxsize=MAX_HERMITE_ORDER + 1)
def partial_matchings(k: int) -> Tuple[Tuple[Tuple[int, ...], ...], ...]:
    """Разбиения {0..k-1} на блоки размера 1 и 2"""
    if k == 0:
        return ((),)
    return tuple(
        p.blocks for p in enumerate_partitions(k)
        if all(len(block) <= 2 for block in p.blocks)
    )


def contract_hermite(tensors: List[np.ndarray], points: np.ndarray, precision: np.ndarray) -> np.ndarray:
    """
    sum_{j1..jk} T_{j1..jk} h_{j1..jk}(x; Γ) для T = tensors[0] ⊗ tensors[1] ⊗ ...

    Args:
        tensors: плотные массивы формы (J,)*order_i
        points: точки x формы (n, J)
        precision: Γ^-1

    Returns:
        массив формы (n,)
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    y = points @ precision
    order = sum(t.ndim for t in tensors)
    if order > MAX_HERMITE_ORDER:
        raise DomainError(f"Порядок свёртки {order} больше {MAX_HERMITE_ORDER}")
    letters = string.ascii_lowercase[:order]
    tensor_specs = []
    position = 0
    for t in tensors:
        tensor_specs.append(letters[position:position + t.ndim])
        position += t.ndim

    total = np.zeros(points.shape[0])
    for blocks in partial_matchings(order):
        operands = list(tensors)
        specs = list(tensor_specs)
        sign = 1.0
        for block in blocks:
            if len(block) == 2:
                operands.append(precision)
                specs.append(letters[block[0]] + letters[block[1]])
                sign = -sign
            else:
                operands.append(y)
                specs.append('z' + letters[block[0]])
        if any(len(block) == 1 for block in blocks):
            total += sign * np.einsum(','.join(specs) + '->z', *operands, optimize=True)
        else:
            # только пары: слагаемое не зависит от x
            total += sign * float(np.einsum(','.join(specs) + '->', *operands, optimize=True))
    return total
