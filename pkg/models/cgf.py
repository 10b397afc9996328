"""
Модели кумулянтной производящей функции (CGF)

Каждый оракул CGF отдаёт значение, градиент и гессиан в точке s.
Вне области определения value() возвращает +inf, этим пользуется
демпфирование в методе Ньютона.
"""

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from cumulants.algebra import MAX_ORDER, CumulantTensor
from cumulants.partitions import pair_matchings
from utils.errors import DomainError, InsufficientCoefficientsError

PSD_TOLERANCE = 1e-10
SYMMETRY_TOLERANCE = 1e-10


class CgfOracle:
    """Базовый интерфейс оракула CGF размерности dimension"""

    dimension: int = 0

    def value(self, s) -> float:
        raise NotImplementedError

    def gradient(self, s) -> np.ndarray:
        raise NotImplementedError

    def hessian(self, s) -> np.ndarray:
        raise NotImplementedError

    @property
    def mean(self) -> np.ndarray:
        return self.gradient(np.zeros(self.dimension))

    def _point(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if s.shape != (self.dimension,):
            raise DomainError(f"Аргумент CGF размерности {s.shape}, ожидалось ({self.dimension},)")
        return s


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class EllipticalCgf(CgfOracle):
    """
    K(s) = s·m + sum_{r=1..R} (c_r / r!) q^r,  q = ½ sΓsᵀ.

    Ряд обрезан на R = len(coeffs) членах, неявного хвоста нет.
    Гауссовская модель: coeffs = (1,).
    """
    m: np.ndarray
    gamma: np.ndarray
    coeffs: Tuple[float, ...]

    def __post_init__(self):
        gamma = np.atleast_2d(np.asarray(self.gamma, dtype=float))
        m = np.atleast_1d(np.asarray(self.m, dtype=float))
        coeffs = tuple(float(c) for c in self.coeffs)

        if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1]:
            raise DomainError(f"Γ должна быть квадратной, получено {gamma.shape}")
        if m.shape != (gamma.shape[0],):
            raise DomainError(f"Длина m={m.shape[0]} не совпадает с размером Γ={gamma.shape[0]}")
        if not coeffs:
            raise DomainError("Нужен хотя бы один коэффициент c_1")
        if not (np.all(np.isfinite(gamma)) and np.all(np.isfinite(m)) and all(map(math.isfinite, coeffs))):
            raise DomainError("Параметры модели содержат NaN/Inf")
        scale = max(1.0, float(np.max(np.abs(gamma))))
        if np.max(np.abs(gamma - gamma.T)) > SYMMETRY_TOLERANCE * scale:
            raise DomainError("Γ не симметрична")
        eigenvalues = np.linalg.eigvalsh(gamma)
        if eigenvalues[0] < -PSD_TOLERANCE * max(eigenvalues[-1], 0.0):
            raise DomainError(f"Γ не положительно полуопределена: λ_min={eigenvalues[0]:.3e}")

        object.__setattr__(self, 'gamma', _frozen(gamma))
        object.__setattr__(self, 'm', _frozen(m))
        object.__setattr__(self, 'coeffs', coeffs)

    @classmethod
    def gaussian(cls, m: Sequence[float], gamma) -> 'EllipticalCgf':
        return cls(m, gamma, (1.0,))

    @property
    def dimension(self) -> int:
        return self.m.shape[0]

    @property
    def n_coeffs(self) -> int:
        return len(self.coeffs)

    def coefficient(self, r: int) -> float:
        """c_r; отсутствующий коэффициент - ошибка, а не ноль"""
        if r < 1 or r > self.n_coeffs:
            raise InsufficientCoefficientsError(2 * r, self.n_coeffs)
        return self.coeffs[r - 1]

    def _series(self, q: float) -> Tuple[float, float, float]:
        # sum c_r q^r/r!, alpha = sum c_r q^{r-1}/(r-1)!, beta = sum_{r>=2} c_r q^{r-2}/(r-2)!
        series = []
        alpha = []
        beta = []
        for r, c in enumerate(self.coeffs, start=1):
            series.append(c * q ** r / math.factorial(r))
            alpha.append(c * q ** (r - 1) / math.factorial(r - 1))
            if r >= 2:
                beta.append(c * q ** (r - 2) / math.factorial(r - 2))
        return math.fsum(series), math.fsum(alpha), math.fsum(beta)

    def value(self, s) -> float:
        s = self._point(s)
        q = 0.5 * float(s @ self.gamma @ s)
        return float(s @ self.m) + self._series(q)[0]

    def gradient(self, s) -> np.ndarray:
        s = self._point(s)
        gs = self.gamma @ s
        _, alpha, _ = self._series(0.5 * float(s @ gs))
        return self.m + alpha * gs

    def hessian(self, s) -> np.ndarray:
        s = self._point(s)
        gs = self.gamma @ s
        _, alpha, beta = self._series(0.5 * float(s @ gs))
        return alpha * self.gamma + beta * np.outer(gs, gs)

    def marginal(self, subset: Iterable[int]) -> 'EllipticalCgf':
        """Подмодель: остальные аргументы CGF зануляются, т.е. m и Γ сужаются на subset"""
        index = _checked_subset(subset, self.dimension)
        return EllipticalCgf(self.m[index], self.gamma[np.ix_(index, index)], self.coeffs)

    def cumulant_tensor(self, order: int) -> CumulantTensor:
        """
        Аналитический тензор совместных кумулянтов.

        Порядок 1 - m, нечётные порядки >= 3 - нули, порядок 2r -
        c_r * сумма по разбиениям на пары произведений элементов Γ.
        """
        if order < 1 or order > MAX_ORDER:
            raise DomainError(f"Порядок {order} вне 1..{MAX_ORDER}")
        tensor = CumulantTensor(self.dimension, order)
        if order == 1:
            for j in range(self.dimension):
                tensor.values[(j,)] = float(self.m[j])
            return tensor
        if order % 2:
            return tensor
        c = self.coefficient(order // 2)
        matchings = pair_matchings(order)
        for key in combinations_with_replacement(range(self.dimension), order):
            total = math.fsum(
                math.prod(self.gamma[key[a], key[b]] for a, b in matching)
                for matching in matchings
            )
            tensor.values[key] = c * total
        return tensor

    def to_dict(self) -> dict:
        return {
            'm': [float(v) for v in self.m],
            'Gamma': [float(v) for v in self.gamma.ravel()],
            'coeffs': list(self.coeffs),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'EllipticalCgf':
        try:
            m = np.asarray(data['m'], dtype=float)
            gamma = np.asarray(data['Gamma'], dtype=float)
            coeffs = data['coeffs']
        except KeyError as e:
            raise DomainError(f"В документе модели нет поля {e}")
        if gamma.size != m.size ** 2:
            raise DomainError(f"Γ из {gamma.size} элементов не подходит к J={m.size}")
        return cls(m, gamma.reshape(m.size, m.size), coeffs)


@dataclass(frozen=True, eq=False)
class GammaCgf(CgfOracle):
    """K(s) = -shape·log(1 - scale·s) для s < 1/scale"""
    shape: float
    scale: float = 1.0

    def __post_init__(self):
        if self.shape <= 0 or self.scale <= 0:
            raise DomainError(f"Параметры гамма-распределения должны быть положительны: {self.shape}, {self.scale}")

    @property
    def dimension(self) -> int:
        return 1

    def _slack(self, s) -> float:
        return 1.0 - self.scale * float(self._point(s)[0])

    def value(self, s) -> float:
        slack = self._slack(s)
        if slack <= 0:
            return math.inf
        return -self.shape * math.log(slack)

    def gradient(self, s) -> np.ndarray:
        slack = self._slack(s)
        return np.array([self.shape * self.scale / slack if slack > 0 else math.inf])

    def hessian(self, s) -> np.ndarray:
        slack = self._slack(s)
        return np.array([[self.shape * self.scale ** 2 / slack ** 2 if slack > 0 else math.inf]])

    def cumulant(self, r: int) -> float:
        """kappa_r = shape·scale^r·(r-1)!"""
        return self.shape * self.scale ** r * math.factorial(r - 1)


@dataclass(frozen=True)
class AggregationMap:
    """Непересекающиеся множества индексов I_1..I_l, покрывающие {0..J-1}"""
    index_sets: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_sets(cls, index_sets: Iterable[Iterable[int]], dimension: int) -> 'AggregationMap':
        normalized = tuple(tuple(sorted(int(j) for j in group)) for group in index_sets)
        if not normalized or any(not group for group in normalized):
            raise DomainError("Карта агрегации содержит пустое множество")
        elements = [j for group in normalized for j in group]
        if len(elements) != len(set(elements)):
            raise DomainError("Множества карты агрегации пересекаются")
        if sorted(elements) != list(range(dimension)):
            raise DomainError(f"Множества карты агрегации не покрывают {{0..{dimension - 1}}}")
        return cls(normalized)

    @classmethod
    def single(cls, dimension: int) -> 'AggregationMap':
        """Одна группа: сумма всех компонент"""
        return cls((tuple(range(dimension)),))

    @classmethod
    def singletons(cls, dimension: int) -> 'AggregationMap':
        return cls(tuple((j,) for j in range(dimension)))

    @property
    def dimension(self) -> int:
        return sum(len(group) for group in self.index_sets)

    def __len__(self) -> int:
        return len(self.index_sets)

    def indicator(self) -> np.ndarray:
        """Матрица G (J×l): g(t) = G t"""
        matrix = np.zeros((self.dimension, len(self.index_sets)))
        for k, group in enumerate(self.index_sets):
            matrix[list(group), k] = 1.0
        return matrix

    def to_list(self) -> List[List[int]]:
        return [list(group) for group in self.index_sets]


@dataclass(frozen=True, eq=False)
class AggregatedCgf(CgfOracle):
    """K_ξ(t) = K_X(G t): CGF вектора групповых сумм"""
    base: CgfOracle
    agg: AggregationMap

    def __post_init__(self):
        if self.agg.dimension != self.base.dimension:
            raise DomainError(
                f"Карта агрегации для J={self.agg.dimension}, а модель размерности {self.base.dimension}"
            )
        object.__setattr__(self, '_g', self.agg.indicator())

    @property
    def dimension(self) -> int:
        return len(self.agg)

    def value(self, t) -> float:
        return self.base.value(self._g @ self._point(t))

    def gradient(self, t) -> np.ndarray:
        return self._g.T @ self.base.gradient(self._g @ self._point(t))

    def hessian(self, t) -> np.ndarray:
        return self._g.T @ self.base.hessian(self._g @ self._point(t)) @ self._g


def _checked_subset(subset: Iterable[int], dimension: int) -> List[int]:
    index = sorted(set(int(j) for j in subset))
    if not index:
        raise DomainError("Пустое множество индексов")
    if index[0] < 0 or index[-1] >= dimension:
        raise DomainError(f"Индексы {index} вне диапазона 0..{dimension - 1}")
    return index
