"""
Чтение CSV с наблюдениями

Разделитель - запятая, десятичная точка, UTF-8. Первая строка считается
заголовком, если ни одно её поле не является числом.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import stats

from utils.errors import DataParseError


@dataclass
class Dataset:
    """Матрица наблюдений n×J с именами столбцов"""
    frame: pd.DataFrame
    path: Optional[str] = None

    @property
    def values(self) -> np.ndarray:
        return self.frame.to_numpy(dtype=float)

    @property
    def columns(self) -> List[str]:
        return [str(c) for c in self.frame.columns]

    @property
    def n(self) -> int:
        return self.frame.shape[0]

    @property
    def dimension(self) -> int:
        return self.frame.shape[1]

    def select(self, columns: Optional[Sequence[str]]) -> 'Dataset':
        """Подмножество столбцов по именам или номерам (в виде строк)"""
        if not columns:
            return self
        chosen = []
        for column in columns:
            key = str(column)
            if key in self.columns:
                chosen.append(self.frame.columns[self.columns.index(key)])
            elif key.isdigit() and int(key) < self.dimension:
                chosen.append(self.frame.columns[int(key)])
            else:
                raise DataParseError(f"Столбец '{key}' отсутствует в данных (есть: {', '.join(self.columns)})")
        return Dataset(self.frame[chosen], self.path)

    def summary(self) -> dict:
        """n, J и среднее/дисперсия/асимметрия по столбцам"""
        values = self.values
        per_column = []
        for j, name in enumerate(self.columns):
            column = values[:, j]
            per_column.append({
                'column': name,
                'mean': float(column.mean()),
                'variance': float(column.var(ddof=1)) if self.n > 1 else math.nan,
                'skewness': float(stats.skew(column)) if self.n > 2 else math.nan,
            })
        return {'n': self.n, 'J': self.dimension, 'columns': per_column}


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def read_dataset(path: str) -> Dataset:
    """
    Raises:
        DataParseError: непрямоугольные данные, нечисловая ячейка, NaN/Inf
            (с номером строки файла и столбца, с 1)
    """
    try:
        raw = pd.read_csv(path, header=None, dtype=str, keep_default_na=False,
                          skip_blank_lines=False, encoding='utf-8')
    except pd.errors.EmptyDataError:
        raise DataParseError(f"Файл {path} пуст")
    except pd.errors.ParserError as e:
        raise DataParseError(f"Непрямоугольные данные в {path}: {e}")
    except (OSError, UnicodeDecodeError) as e:
        raise DataParseError(f"Не удалось прочитать {path}: {e}")

    # номер строки файла (с 1) для каждой строки таблицы
    raw.index = range(1, raw.shape[0] + 1)
    blank = raw.apply(lambda row: all(not isinstance(cell, str) or not cell.strip() for cell in row), axis=1)
    raw = raw[~blank]
    if raw.empty:
        raise DataParseError(f"Файл {path} пуст")

    header = None
    first = raw.iloc[0]
    if not any(isinstance(cell, str) and _is_number(cell.strip()) for cell in first):
        header = [str(cell).strip() for cell in first]
        raw = raw.iloc[1:]
        if raw.empty:
            raise DataParseError(f"В файле {path} только заголовок")

    width = raw.shape[1]
    for number, row in raw.iterrows():
        for j, cell in enumerate(row):
            if not isinstance(cell, str):
                raise DataParseError(f"Ожидалось {width} полей", row=number)
            text = cell.strip()
            if not _is_number(text):
                raise DataParseError(f"Нечисловое значение '{text}'", row=number, column=j + 1)
            if not math.isfinite(float(text)):
                raise DataParseError(f"Значение '{text}' не конечно", row=number, column=j + 1)

    values = raw.apply(lambda column: column.str.strip().astype(float)).to_numpy(dtype=float)
    columns = header or [f'X{j + 1}' for j in range(width)]
    return Dataset(pd.DataFrame(values, columns=columns), path)
