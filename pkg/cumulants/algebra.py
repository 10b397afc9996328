"""
Модуль для перехода между моментами и совместными кумулянтами

Все выборочные величины считаются по plug-in соглашению (средние произведений,
без поправки на смещение): только при нём кумулянт суммы компонент в точности
равен сумме совместных кумулянтов.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, permutations
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from cumulants.partitions import apply_partition, enumerate_partitions, mobius_weight
from utils.errors import DomainError, IncompleteInputError

MAX_ORDER = 8

MultiIndex = Tuple[int, ...]


def make_multi_index(indices: Iterable[int], dimension: Optional[int] = None,
                     max_order: int = MAX_ORDER) -> MultiIndex:
    """Сортирует мультииндекс и проверяет порядок и диапазон индексов"""
    idx = tuple(sorted(int(i) for i in indices))
    if len(idx) > max_order:
        raise DomainError(f"Порядок {len(idx)} больше допустимого {max_order}")
    if idx and idx[0] < 0:
        raise DomainError(f"Отрицательный индекс в {idx}")
    if dimension is not None and idx and idx[-1] >= dimension:
        raise DomainError(f"Индекс {idx[-1]} вне диапазона 0..{dimension - 1}")
    return idx


@dataclass
class CumulantTensor:
    """Симметричный тензор совместных кумулянтов порядка order, хранится по отсортированным мультииндексам"""
    dimension: int
    order: int
    values: Dict[MultiIndex, float] = field(default_factory=dict)

    def __getitem__(self, idx: Iterable[int]) -> float:
        return self.values.get(make_multi_index(idx, self.dimension), 0.0)

    def __setitem__(self, idx: Iterable[int], value: float):
        key = make_multi_index(idx, self.dimension)
        if len(key) != self.order:
            raise DomainError(f"Мультииндекс {key} не порядка {self.order}")
        self.values[key] = float(value)

    def to_dense(self) -> np.ndarray:
        """Полный симметричный массив формы (J,)*order"""
        dense = np.zeros((self.dimension,) * self.order)
        for key, value in self.values.items():
            for perm in set(permutations(key)):
                dense[perm] = value
        return dense

    @classmethod
    def from_dense(cls, array: np.ndarray) -> 'CumulantTensor':
        array = np.asarray(array, dtype=float)
        dimension = array.shape[0]
        order = array.ndim
        tensor = cls(dimension, order)
        for key in combinations_with_replacement(range(dimension), order):
            tensor.values[key] = float(array[key])
        return tensor

    @classmethod
    def constant(cls, dimension: int, order: int, value: float) -> 'CumulantTensor':
        tensor = cls(dimension, order)
        for key in combinations_with_replacement(range(dimension), order):
            tensor.values[key] = float(value)
        return tensor


@dataclass
class MomentSet:
    """Сырые моменты E(X_j1 ... X_jd) по отсортированным мультииндексам; момент порядка 0 равен 1"""
    dimension: int
    values: Dict[MultiIndex, float] = field(default_factory=dict)

    def __post_init__(self):
        self.values.setdefault((), 1.0)

    def get(self, idx: MultiIndex) -> float:
        if idx not in self.values:
            raise IncompleteInputError(idx, 'момент')
        return self.values[idx]


def cumulant_from_moments(moments: MomentSet, idx: Iterable[int]) -> float:
    """cum(X_j1..X_jd) = sum_pi w(pi) prod_{v in pi} E(prod_{j in v} X_j)"""
    idx = make_multi_index(idx, moments.dimension)
    if not idx:
        return 0.0
    terms = []
    for p in enumerate_partitions(len(idx)):
        term = float(mobius_weight(p))
        for block in apply_partition(p, idx):
            term *= moments.get(tuple(sorted(block)))
        terms.append(term)
    return math.fsum(terms)


def moments_from_cumulants(cumulants: Mapping[int, CumulantTensor], idx: Iterable[int]) -> float:
    """E(prod X_j) = sum_pi prod_{v in pi} cum(X_v) - обратное преобразование"""
    idx = tuple(sorted(int(i) for i in idx))
    if not idx:
        return 1.0
    for order in range(1, len(idx) + 1):
        if order not in cumulants:
            raise IncompleteInputError(order, 'кумулянт порядка')
    terms = []
    for p in enumerate_partitions(len(idx)):
        term = 1.0
        for block in apply_partition(p, idx):
            term *= cumulants[len(block)][block]
        terms.append(term)
    return math.fsum(terms)


def univariate_cumulants(kappas: Sequence[float]) -> Dict[int, CumulantTensor]:
    """Кумулянты kappa_1..kappa_R одной переменной в виде тензоров размерности 1"""
    return {
        order: CumulantTensor(1, order, {(0,) * order: float(value)})
        for order, value in enumerate(kappas, start=1)
    }


def univariate_moments_to_cumulants(raw_moments: Sequence[float]) -> Tuple[float, ...]:
    """kappa_1..kappa_R по сырым моментам E(X), ..., E(X^R)"""
    moments = MomentSet(1, {(0,) * r: float(m) for r, m in enumerate(raw_moments, start=1)})
    return tuple(cumulant_from_moments(moments, (0,) * r) for r in range(1, len(raw_moments) + 1))


def univariate_cumulants_to_moments(kappas: Sequence[float]) -> Tuple[float, ...]:
    """E(X), ..., E(X^R) по кумулянтам kappa_1..kappa_R"""
    tensors = univariate_cumulants(kappas)
    return tuple(moments_from_cumulants(tensors, (0,) * r) for r in range(1, len(kappas) + 1))


class SampleMoments:
    """
    Plug-in моменты выборки с кэшем по мультииндексам.

    Моменты порядка >= 2 считаются по центрированным столбцам (кумулянты
    порядка >= 2 инвариантны к сдвигу), суммы - компенсированные (math.fsum).
    """

    def __init__(self, data: np.ndarray):
        data = np.asarray(data, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        if data.ndim != 2 or data.shape[0] == 0:
            raise DomainError("Пустая матрица данных")
        if data.shape[0] < 2:
            raise DomainError("Нужно хотя бы 2 наблюдения")
        self.n, self.dimension = data.shape
        self.means = np.array([math.fsum(column) / self.n for column in data.T])
        self.centered = data - self.means
        self._cache: Dict[MultiIndex, float] = {(): 1.0}

    def moment(self, idx: MultiIndex) -> float:
        if idx not in self._cache:
            product = np.prod(self.centered[:, list(idx)], axis=1)
            self._cache[idx] = math.fsum(product) / self.n
        return self._cache[idx]

    def moment_set(self, idx: MultiIndex) -> MomentSet:
        """Все под-мультииндексы idx, нужные формуле через разбиения"""
        values = {}
        for p in enumerate_partitions(len(idx)):
            for block in apply_partition(p, idx):
                key = tuple(sorted(block))
                values[key] = self.moment(key)
        return MomentSet(self.dimension, values)

    def joint_cumulant(self, idx: Iterable[int]) -> float:
        idx = make_multi_index(idx, self.dimension)
        if not idx:
            return 0.0
        if len(idx) == 1:
            return float(self.means[idx[0]])
        return cumulant_from_moments(self.moment_set(idx), idx)


def sample_joint_cumulant(data: np.ndarray, idx: Iterable[int]) -> float:
    """Выборочный совместный кумулянт (plug-in моменты, без поправки на смещение)"""
    return SampleMoments(data).joint_cumulant(idx)


def _multiset_count(key: MultiIndex) -> int:
    # число упорядоченных r-кортежей, дающих данный мультииндекс
    count = math.factorial(len(key))
    for value in set(key):
        count //= math.factorial(key.count(value))
    return count


def cumulant_of_sum(data: np.ndarray, subset: Iterable[int], r: int,
                    moments: Optional[SampleMoments] = None) -> float:
    """
    r-й кумулянт суммы столбцов subset как сумма совместных кумулянтов по всем r-кортежам.

    Кортежи группируются по мультимножествам с кратностью r!/prod(m_i!).
    """
    subset = sorted(set(int(j) for j in subset))
    if not subset:
        raise DomainError("Пустое множество индексов для суммы")
    if r < 1 or r > MAX_ORDER:
        raise DomainError(f"Порядок r={r} вне 1..{MAX_ORDER}")
    moments = moments or SampleMoments(data)
    if subset[-1] >= moments.dimension or subset[0] < 0:
        raise DomainError(f"Индексы {subset} вне диапазона 0..{moments.dimension - 1}")
    terms = [
        _multiset_count(key) * moments.joint_cumulant(key)
        for key in combinations_with_replacement(subset, r)
    ]
    return math.fsum(terms)


def univariate_sample_cumulant(column: np.ndarray, r: int) -> float:
    """Plug-in кумулянт порядка r одного столбца"""
    return sample_joint_cumulant(np.asarray(column, dtype=float).reshape(-1, 1), (0,) * r)


def sample_cumulant_tensor(data: np.ndarray, order: int,
                           moments: Optional[SampleMoments] = None) -> CumulantTensor:
    """Тензор выборочных совместных кумулянтов заданного порядка"""
    moments = moments or SampleMoments(data)
    tensor = CumulantTensor(moments.dimension, order)
    for key in combinations_with_replacement(range(moments.dimension), order):
        tensor.values[key] = moments.joint_cumulant(key)
    return tensor
