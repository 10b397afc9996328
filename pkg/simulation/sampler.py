"""
Сэмплирование эллиптической модели: Y = m + √V · X, X ~ N(0, Γ), V ~ смесь гамм
"""

import numpy as np

from config import MIXTURE_MAX_RESIDUAL
from estimation.mixture_fit import mixture_residual
from models.cgf import EllipticalCgf
from models.mixture import GammaMixture
from utils.errors import DomainError

EIGEN_TOLERANCE = 1e-10


def replicate_rng(seed: int, replicate: int = 0) -> np.random.Generator:
    """Независимый поток для пары (seed, номер реплики): результат не зависит от числа потоков"""
    if seed is None or int(seed) < 0:
        raise DomainError(f"Нужен неотрицательный целый seed, получено {seed!r}")
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(replicate),)))


def covariance_factor(gamma: np.ndarray) -> np.ndarray:
    """L с L Lᵀ = Γ: Холецкий, для полуопределённой Γ - спектральное разложение"""
    try:
        return np.linalg.cholesky(gamma)
    except np.linalg.LinAlgError:
        eigenvalues, vectors = np.linalg.eigh(gamma)
        cutoff = EIGEN_TOLERANCE * float(np.trace(gamma))
        eigenvalues = np.where(eigenvalues > cutoff, eigenvalues, 0.0)
        return vectors * np.sqrt(eigenvalues)


def check_mixture(model: EllipticalCgf, mix: GammaMixture) -> float:
    """Кумулянты V должны совпадать с коэффициентами модели"""
    residual = mixture_residual(mix, model.coeffs)
    if residual > MIXTURE_MAX_RESIDUAL:
        raise DomainError(
            f"Смесь не соответствует коэффициентам модели {model.coeffs}: невязка {residual:.3e}"
        )
    return residual


def draw(model: EllipticalCgf, mix: GammaMixture, n: int, rng: np.random.Generator,
         factor: np.ndarray = None) -> np.ndarray:
    """n строк модели из данного генератора"""
    if n < 1:
        raise DomainError(f"Размер выборки должен быть >= 1, получено {n}")
    factor = covariance_factor(model.gamma) if factor is None else factor
    mixing = mix.sample(rng, n)
    normal = rng.standard_normal((n, model.dimension)) @ factor.T
    return model.m + np.sqrt(mixing)[:, None] * normal


def sample_model(model: EllipticalCgf, mix: GammaMixture, n: int, seed: int,
                 replicate: int = 0) -> np.ndarray:
    """
    Матрица n×J из модели; полностью детерминирована по (seed, replicate).

    Raises:
        DomainError: смесь не реализует коэффициенты модели или n < 1
    """
    check_mixture(model, mix)
    return draw(model, mix, n, replicate_rng(seed, replicate))
