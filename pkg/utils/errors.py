"""
Иерархия исключений cgf-lab

Код выхода CLI берётся из атрибута exit_code:
0 - успех, 1 - ошибка входных данных, 2 - численная ошибка/ошибка подгонки,
3 - внутренняя ошибка.
"""

from typing import Any, Optional, Sequence


class CgfLabError(Exception):
    """Базовое исключение пакета"""
    exit_code = 3


class InputError(CgfLabError):
    """Ошибка во входных данных или аргументах"""
    exit_code = 1


class DomainError(InputError):
    """Аргумент вне области определения операции"""


class InsufficientCoefficientsError(DomainError):
    """Порядок кумулянта требует коэффициент c_r, которого нет в модели"""

    def __init__(self, order: int, available: int):
        self.order = order
        self.available = available
        super().__init__(
            f"Для кумулянта порядка {order} нужен c_{(order + 1) // 2}, "
            f"а в модели только {available} коэффициент(ов)"
        )


class IncompleteInputError(InputError):
    """Не хватает момента/кумулянта для преобразования"""

    def __init__(self, missing: Any, what: str = 'момент'):
        self.missing = missing
        super().__init__(f"Отсутствует {what} для мультииндекса {missing}")


class ConfigError(InputError):
    """Некорректная конфигурация запуска"""


class DataParseError(InputError):
    """Ошибка разбора CSV с координатами ячейки"""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[int] = None):
        self.row = row
        self.column = column
        where = ''
        if row is not None:
            where = f" (строка {row}" + (f", столбец {column})" if column is not None else ")")
        super().__init__(message + where)


class NumericalError(CgfLabError):
    """Численная процедура не дала результата"""
    exit_code = 2


class ConvergenceError(NumericalError):
    """Метод Ньютона не сошёлся"""

    def __init__(self, message: str, last_iterate: Optional[Sequence[float]] = None,
                 residual: Optional[float] = None):
        self.last_iterate = None if last_iterate is None else list(last_iterate)
        self.residual = residual
        super().__init__(f"{message}; последняя итерация={self.last_iterate}, невязка={residual}")


class QuadratureError(NumericalError):
    """Квадратура не согласуется при измельчении сетки"""

    def __init__(self, coarse: float, fine: float, tolerance: float):
        self.coarse = coarse
        self.fine = fine
        self.tolerance = tolerance
        super().__init__(
            f"Сетка слишком грубая: {coarse:.6g} против {fine:.6g} при измельчении "
            f"(допуск {tolerance:.1e})"
        )


class FitError(NumericalError):
    """Подгонка не достигла требуемой невязки"""

    def __init__(self, message: str, best_residual: float):
        self.best_residual = best_residual
        super().__init__(f"{message}; лучшая невязка={best_residual:.3e}")
