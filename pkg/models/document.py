"""
Документ модели (model.json): модель, смесь V и диагностика подгонки
"""

import json
import os
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from dataset.writer import ensure_dir, write_json
from models.cgf import EllipticalCgf
from models.mixture import GammaMixture
from utils.errors import ConfigError, DomainError


@dataclass
class ModelDocument:
    model: EllipticalCgf
    mixture: Optional[GammaMixture] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            'model': self.model.to_dict(),
            'mixture': self.mixture.to_dict() if self.mixture is not None else None,
            'diagnostics': self.diagnostics,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'ModelDocument':
        if 'model' not in data:
            # плоский документ: поля m, Gamma, coeffs на верхнем уровне
            return cls(EllipticalCgf.from_dict(data))
        mixture = data.get('mixture')
        return cls(
            model=EllipticalCgf.from_dict(data['model']),
            mixture=GammaMixture.from_dict(mixture) if mixture else None,
            diagnostics=data.get('diagnostics') or {},
        )

    def save(self, path: str) -> str:
        ensure_dir(os.path.dirname(os.path.abspath(path)))
        return write_json(self.to_dict(), path)

    @classmethod
    def load(cls, path: str) -> 'ModelDocument':
        try:
            with open(path, encoding='utf-8') as f:
                data = json.load(f)
        except OSError as e:
            raise ConfigError(f"Не удалось открыть документ модели {path}: {e}")
        except json.JSONDecodeError as e:
            raise ConfigError(f"Документ модели {path} не является JSON: {e}")
        if not isinstance(data, dict):
            raise DomainError(f"Документ модели {path} должен быть объектом JSON")
        return cls.from_dict(data)
