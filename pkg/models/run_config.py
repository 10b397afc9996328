"""
Конфигурация запуска (JSON-файл + флаги командной строки)
"""

import json
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Optional

from config import (
    BAND_PROBABILITY, DEFAULT_BLOCK, DEFAULT_ORDERS, DEFAULT_QUANTILE_LEVELS,
    DEFAULT_REPLICATES, DEFAULT_SAMPLE_SIZE, MIXTURE_COMPONENTS, MIXTURE_STARTS, OUTPUT_DIR,
)
from estimation.coefficients import check_orders
from models.cgf import AggregationMap
from simulation.bands import SimulationPlan
from utils.errors import ConfigError, DomainError


@dataclass
class RunConfig:
    """Все параметры команд; уровни квантилей задаются в процентах"""
    input: Optional[str] = None
    model: Optional[str] = None
    columns: Optional[List[str]] = None
    groups: Optional[List[List[int]]] = None
    orders: List[int] = field(default_factory=lambda: list(DEFAULT_ORDERS))
    components: int = MIXTURE_COMPONENTS
    starts: int = MIXTURE_STARTS
    n: int = DEFAULT_SAMPLE_SIZE
    replicates: int = DEFAULT_REPLICATES
    seed: Optional[int] = None
    levels: List[float] = field(default_factory=lambda: list(DEFAULT_QUANTILE_LEVELS))
    block: Optional[int] = DEFAULT_BLOCK
    band_probability: float = BAND_PROBABILITY
    output: str = OUTPUT_DIR
    workers: Optional[int] = None
    save_samples: bool = False

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunConfig':
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"Неизвестные поля конфигурации: {', '.join(unknown)}")
        return cls(**data)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def load(cls, path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> 'RunConfig':
        """Файл (если задан), затем флаги: флаги, отличные от None, побеждают"""
        data: Dict[str, Any] = {}
        if path:
            try:
                with open(path, encoding='utf-8') as f:
                    data = json.load(f)
            except OSError as e:
                raise ConfigError(f"Не удалось открыть конфигурацию {path}: {e}")
            except json.JSONDecodeError as e:
                raise ConfigError(f"Конфигурация {path} не является JSON: {e}")
            if not isinstance(data, dict):
                raise ConfigError(f"Конфигурация {path} должна быть объектом JSON")
        for key, value in (overrides or {}).items():
            if value is not None:
                data[key] = value
        config = cls.from_dict(data)
        config.validate()
        return config

    def validate(self):
        try:
            check_orders(self.orders)
        except DomainError as e:
            raise ConfigError(str(e))
        if self.components < 1:
            raise ConfigError(f"components={self.components} должно быть >= 1")
        if self.workers is not None and self.workers < 1:
            raise ConfigError(f"workers={self.workers} должно быть >= 1")

    def aggregation(self, dimension: int) -> AggregationMap:
        """Карта групп; без groups - одна группа из всех столбцов"""
        if not self.groups:
            return AggregationMap.single(dimension)
        try:
            return AggregationMap.from_sets(self.groups, dimension)
        except DomainError as e:
            raise ConfigError(str(e))

    def plan(self, with_block: bool = True) -> SimulationPlan:
        """План Монте-Карло; seed обязателен"""
        if self.seed is None:
            raise ConfigError("Не задан seed: запуск по часам не допускается")
        try:
            return SimulationPlan(
                n_per_sample=int(self.n),
                n_replicates=int(self.replicates),
                seed=int(self.seed),
                levels=[level / 100.0 for level in self.levels],
                block=int(self.block) if (with_block and self.block) else None,
                band_probability=float(self.band_probability),
            )
        except DomainError as e:
            raise ConfigError(str(e))
