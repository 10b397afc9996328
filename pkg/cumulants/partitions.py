"""
Модуль для перечисления разбиений множеств

Разбиения нужны и для меры взаимодействия Ланкастера, и для формулы
совместных кумулянтов через моменты: обе суммы идут по всем разбиениям
с весом (-1)^{|pi|-1} (|pi|-1)!.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Iterator, List, Sequence, Tuple

from utils.errors import DomainError

MAX_PARTITION_SIZE = 12  # B_12 = 4 213 597
MAX_BELL_INDEX = 20


@dataclass(frozen=True)
class SetPartition:
    """Разбиение {0, ..., d-1} на непустые блоки, упорядоченные по наименьшему элементу"""
    blocks: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> 'SetPartition':
        """Создаёт разбиение из произвольных блоков, проверяя инварианты"""
        normalized = [tuple(sorted(set(block))) for block in blocks]
        if any(not block for block in normalized):
            raise DomainError("Разбиение содержит пустой блок")
        elements = [e for block in normalized for e in block]
        if len(elements) != len(set(elements)):
            raise DomainError("Блоки разбиения пересекаются")
        if sorted(elements) != list(range(len(elements))):
            raise DomainError(f"Объединение блоков не равно {{0..{len(elements) - 1}}}")
        normalized.sort(key=lambda block: block[0])
        return cls(tuple(normalized))

    @property
    def size(self) -> int:
        """Мощность разбиваемого множества d"""
        return sum(len(block) for block in self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)


def bell_number(k: int) -> int:
    """Число Белла B_k по рекуррентности B_{k+1} = sum C(k, r) B_r"""
    if k < 0:
        raise DomainError(f"Число Белла не определено для k={k}")
    if k > MAX_BELL_INDEX:
        raise DomainError(f"k={k} больше допустимого {MAX_BELL_INDEX}")
    return _bell_table(MAX_BELL_INDEX)[k]


@lru_cache(maxsize=1)
def _bell_table(limit: int) -> Tuple[int, ...]:
    bells = [1]
    for k in range(limit):
        bells.append(sum(comb(k, r) * bells[r] for r in range(k + 1)))
    return tuple(bells)


def _restricted_growth_strings(d: int) -> Iterator[List[int]]:
    # a[i] - номер блока элемента i; новый блок получает номер max+1
    labels = [0] * d

    def extend(position: int, blocks_used: int) -> Iterator[List[int]]:
        if position == d:
            yield labels
            return
        for label in range(blocks_used + 1):
            labels[position] = label
            yield from extend(position + 1, max(blocks_used, label + 1))

    yield from extend(1, 1)


@lru_cache(maxsize=MAX_PARTITION_SIZE + 1)
def enumerate_partitions(d: int) -> Tuple[SetPartition, ...]:
    """
    Все разбиения {0, ..., d-1} в детерминированном (лексикографическом по RGS) порядке.

    Args:
        d: мощность множества, 1 <= d <= 12
    """
    if d < 1 or d > MAX_PARTITION_SIZE:
        raise DomainError(f"Перечисление разбиений допустимо для 1 <= d <= {MAX_PARTITION_SIZE}, получено d={d}")

    partitions = []
    for labels in _restricted_growth_strings(d):
        blocks: List[List[int]] = []
        for element, label in enumerate(labels):
            if label == len(blocks):
                blocks.append([element])
            else:
                blocks[label].append(element)
        partitions.append(SetPartition(tuple(tuple(block) for block in blocks)))
    return tuple(partitions)


def mobius_weight(p: SetPartition) -> int:
    """Вес (-1)^{|pi|-1} (|pi|-1)!"""
    k = len(p.blocks)
    return (-1) ** (k - 1) * factorial(k - 1)


@lru_cache(maxsize=16)
def pair_matchings(k: int) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
    """Разбиения {0..k-1} на пары (пусто для нечётного k); используются для кумулянтов эллиптической модели"""
    if k % 2:
        return ()
    return tuple(
        tuple((block[0], block[1]) for block in p.blocks)
        for p in enumerate_partitions(k)
        if all(len(block) == 2 for block in p.blocks)
    ) if k else ((),)


def apply_partition(p: SetPartition, items: Sequence) -> List[Tuple]:
    """Раскладывает позиции items по блокам разбиения"""
    return [tuple(items[position] for position in block) for block in p.blocks]
