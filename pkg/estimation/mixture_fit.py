"""
Подгонка смеси гамма-распределений под кумулянты c_1..c_R

Кумулянты смеси считаются точно: сырые моменты компонент смешиваются
линейно и переводятся в кумулянты формулой через разбиения.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy import optimize, special

from config import MIXTURE_COMPONENTS, MIXTURE_MAX_RESIDUAL, MIXTURE_STARTS, MIXTURE_TARGET_RESIDUAL
from cumulants.algebra import univariate_moments_to_cumulants
from models.mixture import GammaMixture
from utils.errors import DomainError, FitError
from utils.logger import get_logger
from utils.workers import resolve_workers

FIT_SEED = 20150427
LOG_BOUND = 25.0
LOGIT_BOUND = 30.0
RESIDUAL_FLOOR = 1e-12


@dataclass
class _StartResult:
    start: int
    params: np.ndarray
    residual: float


def _unpack(params: np.ndarray, n: int):
    shapes = np.exp(params[:n])
    scales = np.exp(params[n:2 * n])
    logits = np.concatenate(([0.0], params[2 * n:]))
    weights = special.softmax(logits)
    return weights, shapes, scales


def mixture_cumulants(weights, shapes, scales, order: int) -> np.ndarray:
    """kappa_1..kappa_order смеси по её параметрам"""
    raw = [
        float(np.sum(weights * scales ** r * special.poch(shapes, r)))
        for r in range(1, order + 1)
    ]
    return np.asarray(univariate_moments_to_cumulants(raw))


def relative_residuals(cumulants: np.ndarray, targets: np.ndarray) -> np.ndarray:
    return (cumulants - targets) / np.maximum(np.abs(targets), RESIDUAL_FLOOR)


def mixture_residual(mixture: GammaMixture, targets: Sequence[float]) -> float:
    """Максимальная относительная невязка кумулянтов смеси"""
    targets = np.asarray(targets, dtype=float)
    cumulants = np.asarray(mixture.cumulants(len(targets)))
    return float(np.max(np.abs(relative_residuals(cumulants, targets))))


def _initial_guess(targets: np.ndarray, n: int) -> np.ndarray:
    # метод моментов для одной гаммы: shape = c1^2/c2, scale = c2/c1
    c1 = targets[0]
    if len(targets) >= 2 and targets[1] > 0:
        shape, scale = c1 ** 2 / targets[1], targets[1] / c1
    else:
        shape, scale = 1.0, c1
    return np.concatenate((
        np.full(n, np.log(shape)),
        np.full(n, np.log(scale)),
        np.zeros(n - 1),
    ))


def _run_start(start: int, targets: np.ndarray, n: int, base: np.ndarray) -> _StartResult:
    params = base.copy()
    if start:
        rng = np.random.default_rng(np.random.SeedSequence(entropy=FIT_SEED, spawn_key=(start,)))
        params[:2 * n] += rng.normal(0.0, 0.75, size=2 * n)
        params[2 * n:] += rng.normal(0.0, 1.0, size=n - 1)
    lower = np.concatenate((np.full(2 * n, -LOG_BOUND), np.full(n - 1, -LOGIT_BOUND)))
    upper = -lower
    params = np.clip(params, lower, upper)

    def residuals(p):
        values = relative_residuals(mixture_cumulants(*_unpack(p, n), len(targets)), targets)
        return np.nan_to_num(values, nan=1e10, posinf=1e10, neginf=-1e10)

    try:
        result = optimize.least_squares(
            residuals, params, bounds=(lower, upper), method='trf',
            x_scale='jac', xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400 * len(params),
        )
        best = result.x
    except (ValueError, FloatingPointError):
        best = params
    return _StartResult(start, best, float(np.max(np.abs(residuals(best)))))


def fit_gamma_mixture(targets: Sequence[float], n_components: int = MIXTURE_COMPONENTS,
                      starts: int = MIXTURE_STARTS, workers: Optional[int] = None,
                      logger: Optional[logging.Logger] = None) -> GammaMixture:
    """
    Смесь n_components гамма-распределений, первые R кумулянтов которой равны targets.

    Если все c_r при r >= 2 нулевые, возвращается вырожденная V = c_1.
    Старты независимы и выполняются в пуле потоков; лучший выбирается по
    невязке, при равенстве - по номеру старта.

    Raises:
        DomainError: c_1 <= 0, c_2 < 0 или R > 2·n_components
        FitError: лучшая невязка больше допустимой
    """
    logger = logger or get_logger()
    targets = np.asarray(targets, dtype=float)
    if targets.ndim != 1 or targets.size == 0:
        raise DomainError("Нужен хотя бы один целевой кумулянт")
    if n_components < 1:
        raise DomainError(f"Число компонент должно быть >= 1, получено {n_components}")
    if targets[0] <= 0:
        raise DomainError(f"c_1={targets[0]} <= 0 не реализуется положительной V")
    if targets.size >= 2 and targets[1] < 0:
        raise DomainError(f"c_2={targets[1]} < 0: дисперсия V не может быть отрицательной")
    if targets.size > 2 * n_components:
        raise DomainError(
            f"{targets.size} кумулянтов не подогнать смесью из {n_components} компонент"
        )

    if targets.size == 1 or not np.any(targets[1:]):
        logger.info(f"[FIT] Старшие c_r нулевые, V вырождена в точке {targets[0]:.6g}")
        return GammaMixture.degenerate(float(targets[0]))
    if targets[1] == 0:
        raise FitError("c_2 = 0 при ненулевых старших c_r: V вырождена, а старшие кумулянты нет", np.inf)

    base = _initial_guess(targets, n_components)
    starts = max(1, int(starts))
    with ThreadPoolExecutor(max_workers=resolve_workers(workers)) as pool:
        results: List[_StartResult] = list(pool.map(
            lambda start: _run_start(start, targets, n_components, base), range(starts)
        ))

    for result in results:
        logger.debug(f"[FIT] Старт {result.start}: невязка {result.residual:.3e}")
    best = min(results, key=lambda result: (result.residual, result.start))

    if best.residual > MIXTURE_MAX_RESIDUAL:
        raise FitError(f"Смесь из {n_components} гамма-компонент не подогналась за {starts} стартов",
                       best.residual)
    if best.residual > MIXTURE_TARGET_RESIDUAL:
        logger.warning(f"[FIT] Невязка смеси {best.residual:.3e} выше целевой {MIXTURE_TARGET_RESIDUAL:.0e}")

    weights, shapes, scales = _unpack(best.params, n_components)
    weights = weights / weights.sum()
    mixture = GammaMixture(list(weights), list(shapes), list(scales))
    logger.info(
        f"[FIT] Смесь подогнана: {n_components} компонент, старт {best.start}, "
        f"невязка {best.residual:.3e}"
    )
    return mixture
