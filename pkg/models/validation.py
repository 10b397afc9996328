"""
Проверка допустимости модели перед сэмплированием
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from config import MIXTURE_COMPONENTS
from estimation.mixture_fit import fit_gamma_mixture, mixture_residual
from models.cgf import PSD_TOLERANCE, EllipticalCgf
from models.mixture import GammaMixture
from utils.errors import CgfLabError
from utils.logger import get_logger


@dataclass
class ValidityReport:
    """Результат validate_model: валидность, диагностика и найденная смесь"""
    valid: bool
    min_eigenvalue: float
    messages: List[str] = field(default_factory=list)
    mixture: Optional[GammaMixture] = None
    residual: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            'valid': self.valid,
            'min_eigenvalue': self.min_eigenvalue,
            'messages': list(self.messages),
            'residual': self.residual,
        }


def validate_model(model: EllipticalCgf, n_components: Optional[int] = None,
                   logger: Optional[logging.Logger] = None) -> ValidityReport:
    """
    Γ должна быть PSD, а (c_1..c_R) - первыми R кумулянтами неотрицательной V.

    Реализуемость проверяется попыткой подогнать смесь гамма-распределений.
    Ошибки не бросаются: все отказы попадают в отчёт.
    """
    logger = logger or get_logger()
    messages = []
    eigenvalues = np.linalg.eigvalsh(model.gamma)
    min_eigenvalue = float(eigenvalues[0])
    psd = min_eigenvalue >= -PSD_TOLERANCE * max(float(eigenvalues[-1]), 0.0)
    if not psd:
        messages.append(f"Γ не PSD: λ_min={min_eigenvalue:.3e}")

    coeffs = list(model.coeffs)
    mixture = None
    residual = None
    try:
        mixture = fit_gamma_mixture(coeffs, n_components or MIXTURE_COMPONENTS, logger=logger)
        residual = mixture_residual(mixture, coeffs)
    except CgfLabError as e:
        messages.append(f"Коэффициенты {coeffs} не реализуются неотрицательной V: {e}")

    valid = psd and mixture is not None
    if valid:
        logger.info(f"[VALIDATE] Модель допустима (λ_min={min_eigenvalue:.3e}, невязка V={residual:.3e})")
    else:
        logger.warning(f"[VALIDATE] Модель недопустима: {'; '.join(messages)}")
    return ValidityReport(valid, min_eigenvalue, messages, mixture, residual)
