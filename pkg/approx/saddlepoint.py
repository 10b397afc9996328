"""
Седловая аппроксимация плотности и формула Луганнани-Райса

Седловая точка λ̂ решает ∇K(λ̂) = x; это минимум выпуклой функции
K(λ) - xᵀλ, поэтому шаг Ньютона демпфируется по ней.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import stats

from config import NEWTON_MAX_ITER, NEWTON_TOL
from models.cgf import CgfOracle
from utils.errors import ConvergenceError, DomainError
from utils.logger import get_logger

MAX_HALVINGS = 60
MAX_PD_BACKOFFS = 30
ARMIJO = 1e-4
SMALL_R = 1e-4


@dataclass
class SaddlepointSolution:
    """λ̂, K(λ̂), Σ̂ = ∇²K(λ̂), признак сходимости и число итераций"""
    lam: np.ndarray
    value: float
    hessian: np.ndarray
    converged: bool
    iterations: int


def _is_positive_definite(matrix: np.ndarray) -> bool:
    if not np.all(np.isfinite(matrix)):
        return False
    try:
        np.linalg.cholesky(matrix)
        return True
    except np.linalg.LinAlgError:
        return False


def solve_saddlepoint(cgf: CgfOracle, x, max_iter: int = NEWTON_MAX_ITER, tol: float = NEWTON_TOL,
                      start=None, logger: Optional[logging.Logger] = None) -> SaddlepointSolution:
    """
    Демпфированный метод Ньютона для ∇K(λ) = x.

    Из λ = 0 первый шаг совпадает с гауссовским решением Σ̂(0)^-1 (x - m).
    Критерий остановки: ‖∇K(λ) - x‖ <= tol·(1 + ‖x‖).

    Raises:
        ConvergenceError: нет сходимости за max_iter итераций или гессиан
            не становится положительно определённым
    """
    logger = logger or get_logger()
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (cgf.dimension,):
        raise DomainError(f"Точка размерности {x.shape}, CGF размерности {cgf.dimension}")
    threshold = tol * (1.0 + float(np.linalg.norm(x)))

    lam = np.zeros(cgf.dimension) if start is None else np.array(start, dtype=float)
    value = cgf.value(lam)
    hessian = cgf.hessian(lam)
    if not (math.isfinite(value) and _is_positive_definite(hessian)):
        raise ConvergenceError("Гессиан CGF в начальной точке не положительно определён", lam)
    objective = value - float(x @ lam)
    residual = cgf.gradient(lam) - x

    for iteration in range(max_iter + 1):
        residual_norm = float(np.linalg.norm(residual))
        if residual_norm <= threshold:
            return SaddlepointSolution(lam, value, hessian, True, iteration)
        if iteration == max_iter:
            break

        step = np.linalg.solve(hessian, -residual)
        slope = float(residual @ step)
        t = 1.0
        for _ in range(MAX_HALVINGS):
            candidate = lam + t * step
            candidate_value = cgf.value(candidate)
            if math.isfinite(candidate_value):
                candidate_objective = candidate_value - float(x @ candidate)
                candidate_residual = cgf.gradient(candidate) - x
                if (candidate_objective <= objective + ARMIJO * t * slope
                        or np.linalg.norm(candidate_residual) < residual_norm):
                    break
            t *= 0.5
        else:
            raise ConvergenceError("Шаг Ньютона не уменьшает невязку", lam, residual_norm)

        candidate_hessian = cgf.hessian(candidate)
        backoffs = 0
        while not _is_positive_definite(candidate_hessian):
            backoffs += 1
            if backoffs > MAX_PD_BACKOFFS:
                raise ConvergenceError("Гессиан CGF не положительно определён на траектории Ньютона",
                                       candidate, residual_norm)
            t *= 0.5
            candidate = lam + t * step
            candidate_value = cgf.value(candidate)
            candidate_objective = candidate_value - float(x @ candidate)
            candidate_residual = cgf.gradient(candidate) - x
            candidate_hessian = cgf.hessian(candidate)
        if backoffs:
            logger.warning(f"[APPROX] Шаг Ньютона уменьшен {backoffs} раз(а) ради положительной определённости")

        lam, value, hessian = candidate, candidate_value, candidate_hessian
        objective, residual = candidate_objective, candidate_residual
        logger.debug(f"[APPROX] Ньютон: итерация {iteration + 1}, шаг {t:.3g}, невязка {np.linalg.norm(residual):.3e}")

    raise ConvergenceError(f"Метод Ньютона не сошёлся за {max_iter} итераций", lam,
                           float(np.linalg.norm(residual)))


def saddlepoint_density(cgf: CgfOracle, x, **kwargs) -> Tuple[float, SaddlepointSolution]:
    """exp(K(λ̂) - xᵀλ̂) / ((2π)^{J/2} det(Σ̂)^{1/2})"""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    solution = solve_saddlepoint(cgf, x, **kwargs)
    _, logdet = np.linalg.slogdet(solution.hessian)
    log_density = (solution.value - float(x @ solution.lam)
                   - 0.5 * cgf.dimension * math.log(2.0 * math.pi) - 0.5 * logdet)
    return math.exp(log_density), solution


def _origin_cumulants(cgf: CgfOracle) -> Tuple[float, float, float]:
    # kappa2 точно, kappa3 и kappa4 - центральные разности K'' в нуле
    k2 = float(cgf.hessian(np.zeros(1))[0, 0])
    h = 1e-3 / math.sqrt(k2)
    plus = float(cgf.hessian(np.array([h]))[0, 0])
    minus = float(cgf.hessian(np.array([-h]))[0, 0])
    k3 = (plus - minus) / (2.0 * h)
    k4 = (plus - 2.0 * k2 + minus) / h ** 2
    return k2, k3, k4


def small_r_correction(tau: float, k2: float, k3: float, k4: float) -> float:
    """Ряд для 1/r - 1/q при τ̂ -> 0: (1/√κ2)[a/6 + τ̂(b/8 - 5a²/24)], a = κ3/κ2, b = κ4/κ2"""
    a = k3 / k2
    b = k4 / k2
    return (a / 6.0 + tau * (b / 8.0 - 5.0 * a ** 2 / 24.0)) / math.sqrt(k2)


def lugannani_rice_cdf(cgf: CgfOracle, x0: float, **kwargs) -> float:
    """
    P(X <= x0) ≈ Φ(r) + φ(r)(1/r - 1/q),
    r = sign(τ̂)√(2[τ̂x0 - K(τ̂)]), q = τ̂√K''(τ̂).

    При |r| < 1e-4 разность 1/r - 1/q заменяется рядом по τ̂.
    Результат обрезается до [0, 1].
    """
    if cgf.dimension != 1:
        raise DomainError(f"Формула Луганнани-Райса только для одномерной CGF, получена размерность {cgf.dimension}")
    x0 = float(x0)
    solution = solve_saddlepoint(cgf, np.array([x0]), **kwargs)
    tau = float(solution.lam[0])
    exponent = max(tau * x0 - solution.value, 0.0)
    r = math.copysign(math.sqrt(2.0 * exponent), tau)
    if abs(r) < SMALL_R:
        correction = small_r_correction(tau, *_origin_cumulants(cgf))
    else:
        q = tau * math.sqrt(float(solution.hessian[0, 0]))
        correction = 1.0 / r - 1.0 / q
    probability = float(stats.norm.cdf(r) + stats.norm.pdf(r) * correction)
    return min(1.0, max(0.0, probability))


def lugannani_rice_tail(cgf: CgfOracle, x0: float, **kwargs) -> float:
    """P(X > x0)"""
    return 1.0 - lugannani_rice_cdf(cgf, x0, **kwargs)
