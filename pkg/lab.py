"""
Основной класс cgf-lab: по одному методу на команду CLI

Библиотечные функции бросают исключения; здесь они превращаются в словари
результата {'success': False, 'error', 'message', 'exit_code'}.
"""

import logging
import os
from typing import Any, Dict, Optional, Sequence

import numpy as np

from approx.cornish_fisher import cornish_fisher_quantile
from approx.edgeworth import model_edgeworth_density
from approx.entropy import entropy_approx, gaussian_entropy
from approx.saddlepoint import lugannani_rice_cdf, saddlepoint_density
from approx.tail import tail_prob_marginal
from cumulants.algebra import sample_cumulant_tensor
from cumulants.lancaster import (
    EmpiricalOracle, cumulant_via_lancaster_integral, grid_from_data, lancaster_measure,
)
from dataset.reader import Dataset, read_dataset
from dataset.writer import (
    ensure_dir, render_report, samples_frame, write_csv, write_text,
)
from estimation.coefficients import fit_coefficients, sum_sample_cumulants
from estimation.covariance import estimate_covariance
from estimation.mixture_fit import fit_gamma_mixture, mixture_residual
from models.aggregation import aggregate_cgf, group_cov, group_cumulants, sum_cumulants
from models.cgf import AggregationMap, EllipticalCgf
from models.document import ModelDocument
from models.run_config import RunConfig
from models.validation import validate_model
from simulation.bands import maxima_bands, quantile_bands, run_monte_carlo
from simulation.sampler import sample_model
from utils.errors import CgfLabError, ConfigError, DomainError, InsufficientCoefficientsError
from utils.logger import get_logger
from utils.stats import Statistics

MODEL_FILE = 'model.json'
BANDS_FILE = 'bands.csv'
BLOCKMAX_FILE = 'blockmax.csv'
REPLICATES_FILE = 'replicates.csv'
SAMPLES_FILE = 'samples.csv'
REPORT_FILE = 'report.txt'


def _plain(value: Any) -> Any:
    """numpy-типы -> JSON-совместимые"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


class CgfLab:
    def __init__(self, config: RunConfig, logger: Optional[logging.Logger] = None,
                 stats: Optional[Statistics] = None):
        """
        Args:
            config: конфигурация запуска (файл + флаги)
            logger: логгер; по умолчанию общий логгер пакета
            stats: статистика запуска
        """
        self.config = config
        self.logger = logger or get_logger()
        self.stats = stats or Statistics()
        self.logger.debug("[INIT] cgf-lab инициализирован")

    # ------------------------------------------------------------------ общее

    def run(self, command: str, **kwargs) -> Dict[str, Any]:
        """Выполняет команду и превращает исключения в словарь результата"""
        self.stats.stats['command'] = command
        handler = getattr(self, command, None)
        if handler is None:
            return {'success': False, 'error': 'unknown_command', 'message': command, 'exit_code': 1}
        try:
            result = handler(**kwargs)
            result.setdefault('success', True)
            result.setdefault('exit_code', 0)
            return result
        except CgfLabError as e:
            self.stats.mark_failed()
            self.logger.error(f"[{command.upper()}] {type(e).__name__}: {e}")
            return {'success': False, 'error': type(e).__name__, 'message': str(e), 'exit_code': e.exit_code}
        except Exception as e:
            self.stats.mark_failed()
            self.logger.exception(f"[{command.upper()}] Внутренняя ошибка: {e}")
            return {'success': False, 'error': 'internal', 'message': str(e), 'exit_code': 3}
        finally:
            self.stats.finish()

    def _dataset(self) -> Dataset:
        if not self.config.input:
            raise ConfigError("Не задан входной файл (input)")
        with self.stats.stage('ingest'):
            dataset = read_dataset(self.config.input).select(self.config.columns)
        self.stats.record_dataset(dataset.n, dataset.dimension)
        self.logger.info(f"[INGEST] {self.config.input}: n={dataset.n}, J={dataset.dimension}")
        return dataset

    def _document(self) -> ModelDocument:
        if not self.config.model:
            raise ConfigError("Не задан документ модели (model)")
        return ModelDocument.load(self.config.model)

    def _mixture(self, document: ModelDocument):
        if document.mixture is not None:
            return document.mixture
        self.logger.info("[FIT] В документе нет смеси V, проверяю модель и подгоняю смесь по коэффициентам")
        report = validate_model(document.model, self.config.components, self.logger)
        if not report.valid:
            raise DomainError(f"Модель недопустима: {'; '.join(report.messages)}")
        return report.mixture

    def _output(self, name: str) -> str:
        path = os.path.join(ensure_dir(self.config.output), name)
        self.stats.record_file(path)
        return path

    # ---------------------------------------------------------------- команды

    def ingest(self) -> Dict[str, Any]:
        """Сводка по входным данным"""
        return {'summary': self._dataset().summary()}

    def fit(self) -> Dict[str, Any]:
        """Γ̂ по τ Кендалла, c_r по кумулянтам суммы, смесь V; пишет model.json"""
        dataset = self._dataset()
        data = dataset.values
        orders = sorted(self.config.orders)

        with self.stats.stage('fit'):
            covariance = estimate_covariance(data, dataset.columns, self.logger)
            kappas = sum_sample_cumulants(data, orders)
            coeffs = fit_coefficients(covariance.gamma, kappas, orders, self.logger)
            model = EllipticalCgf(data.mean(axis=0), covariance.gamma, coeffs)
            mixture = fit_gamma_mixture(coeffs, self.config.components, self.config.starts,
                                        self.config.workers, self.logger)
        if covariance.psd_adjustment > 0:
            self.stats.increment_warnings()

        diagnostics = {
            'columns': dataset.columns,
            'n': dataset.n,
            'psd_adjustment': covariance.psd_adjustment,
            'kendall_correlation': covariance.correlation.ravel(),
            'sample_sum_cumulants': {str(order): kappas[order] for order in orders},
            'gamma_total': float(covariance.gamma.sum()),
            'mixture_residual': mixture_residual(mixture, coeffs),
        }
        if self.config.groups:
            diagnostics['groups'] = self._group_diagnostics(model, data)

        document = ModelDocument(model, mixture, _plain(diagnostics))
        path = self._output(MODEL_FILE)
        document.save(path)
        self.logger.info(f"[FIT] Модель записана в {path}")
        return {'model': path, 'coeffs': list(coeffs), 'diagnostics': document.diagnostics}

    def _group_diagnostics(self, model: EllipticalCgf, data: np.ndarray) -> Dict[str, Any]:
        """Аналитические групповые ковариации и кумулянты рядом с выборочными"""
        agg = self.config.aggregation(model.dimension)
        groups = data @ agg.indicator()
        result: Dict[str, Any] = {'sets': agg.to_list(), 'covariance': {}, 'cumulants': {}}
        for a in range(len(agg)):
            for b in range(a + 1, len(agg)):
                result['covariance'][f'{a}-{b}'] = {
                    'analytic': group_cov(model, agg.index_sets[a], agg.index_sets[b]),
                    'printed': group_cov(model, agg.index_sets[a], agg.index_sets[b], printed=True),
                    'sample': float(np.cov(groups[:, a], groups[:, b], bias=True)[0, 1]),
                }
        for g, group in enumerate(agg.index_sets):
            for order in (2, 4):
                try:
                    analytic = group_cumulants(model, group, order)
                    printed = group_cumulants(model, group, order, printed=True)
                except InsufficientCoefficientsError:
                    continue
                result['cumulants'][f'{g}-{order}'] = {
                    'analytic': analytic,
                    'printed': printed,
                    'sample': sum_sample_cumulants(groups[:, [g]], [order])[order],
                }
        return result

    def _sum_cornish_fisher(self, model: EllipticalCgf, levels: Sequence[float]):
        """Квантили Корниша-Фишера суммы S по аналитическим кумулянтам"""
        subset = range(model.dimension)
        kappa = [sum_cumulants(model, subset, 1), sum_cumulants(model, subset, 2), 0.0]
        if model.n_coeffs >= 2:
            kappa.append(sum_cumulants(model, subset, 4))
        return [cornish_fisher_quantile(kappa, p) if 0.0 < p < 1.0 else float('nan') for p in levels]

    def simulate(self) -> Dict[str, Any]:
        """Реплики Монте-Карло: replicates.csv, bands.csv, blockmax.csv, samples.csv"""
        document = self._document()
        model = document.model
        mixture = self._mixture(document)
        plan = self.config.plan()

        with self.stats.stage('simulate'):
            result = run_monte_carlo(model, mixture, plan, self.config.workers, self.logger)
        self.stats.record_simulation(plan.n_replicates, plan.n_per_sample)

        files = [write_csv(result.replicate_frame(), self._output(REPLICATES_FILE))]
        if plan.levels:
            frame = quantile_bands(result).to_frame()
            frame['cornish_fisher'] = self._sum_cornish_fisher(model, plan.levels)
            files.append(write_csv(frame, self._output(BANDS_FILE)))
        if plan.block:
            files.append(write_csv(maxima_bands(result).to_frame(), self._output(BLOCKMAX_FILE)))
        if self.config.save_samples:
            samples = sample_model(model, mixture, plan.n_per_sample, plan.seed)
            columns = [f'Y{j + 1}' for j in range(model.dimension)]
            files.append(write_csv(samples_frame(samples, columns), self._output(SAMPLES_FILE), float_format=None))
        return {'files': files}

    def report(self) -> Dict[str, Any]:
        """Полосы квантилей и блочных максимумов против наблюдаемых данных; report.txt"""
        document = self._document()
        model = document.model
        mixture = self._mixture(document)
        observed = self._dataset().values
        if observed.shape[1] != model.dimension:
            raise ConfigError(f"В данных {observed.shape[1]} столбцов, в модели J={model.dimension}")
        if self.config.block and self.config.block > observed.shape[0]:
            raise ConfigError(f"Блок {self.config.block} больше числа наблюдений {observed.shape[0]}")
        plan = self.config.plan()

        with self.stats.stage('report'):
            result = run_monte_carlo(model, mixture, plan, self.config.workers, self.logger)
        self.stats.record_simulation(plan.n_replicates, plan.n_per_sample)

        bands = quantile_bands(result, observed) if plan.levels else None
        cornish_fisher = self._sum_cornish_fisher(model, plan.levels) if plan.levels else None
        maxima = maxima_bands(result, observed) if plan.block else None

        files = []
        if bands is not None:
            frame = bands.to_frame()
            frame['cornish_fisher'] = cornish_fisher
            files.append(write_csv(frame, self._output(BANDS_FILE)))
        if maxima is not None:
            files.append(write_csv(maxima.to_frame(), self._output(BLOCKMAX_FILE)))
        text = render_report(bands, cornish_fisher, maxima, plan.block, document.diagnostics, self.stats.summary())
        files.append(write_text(text, self._output(REPORT_FILE)))

        result_dict: Dict[str, Any] = {'files': files}
        if bands is not None:
            result_dict['covered'] = int(np.sum(bands.covered()))
            result_dict['levels'] = len(bands.levels)
        return result_dict

    def approx(self, kind: str, point: Optional[Sequence[float]] = None,
               subset: Optional[Sequence[int]] = None, thresholds: Optional[Sequence[float]] = None,
               x0: Optional[float] = None, p: Optional[float] = None,
               method: str = 'saddlepoint') -> Dict[str, Any]:
        """
        Приближения по модели:
            density  - плотность в point (седловая или Эджворт)
            tail     - P(Y_subset >= thresholds)
            cdf      - Луганнани-Райс для суммы компонент subset в x0
            quantile - Корниш-Фишер для суммы компонент subset
            entropy  - энтропия модели или данных (если задан input)
        """
        if kind == 'entropy':
            return self._entropy()
        model = self._document().model
        index = list(subset) if subset else list(range(model.dimension))

        if kind == 'density':
            if point is None:
                raise ConfigError("Для плотности нужна точка --point")
            marginal = model.marginal(index) if subset else model
            if method == 'edgeworth':
                return {'density': float(model_edgeworth_density(marginal, point)), 'method': method,
                        'subset': index}
            density, solution = saddlepoint_density(marginal, point, logger=self.logger)
            return {'density': density, 'method': method, 'subset': index,
                    'saddlepoint': solution.lam.tolist(), 'iterations': solution.iterations}
        if kind == 'tail':
            if thresholds is None:
                raise ConfigError("Для хвоста нужны пороги --thresholds")
            return {'tail': tail_prob_marginal(model, index, thresholds, logger=self.logger)}
        if kind == 'cdf':
            if x0 is None:
                raise ConfigError("Для функции распределения нужен --x0")
            marginal = model.marginal(index)
            cdf = lugannani_rice_cdf(aggregate_cgf(marginal, AggregationMap.single(marginal.dimension)), x0,
                                     logger=self.logger)
            return {'cdf': cdf, 'tail': 1.0 - cdf, 'subset': sorted(set(index))}
        if kind == 'quantile':
            if p is None:
                raise ConfigError("Для квантиля нужна вероятность --p")
            kappa = [sum_cumulants(model, index, 1), sum_cumulants(model, index, 2), 0.0]
            if model.n_coeffs >= 2:
                kappa.append(sum_cumulants(model, index, 4))
            return {'quantile': cornish_fisher_quantile(kappa, p), 'kappa': kappa}
        raise ConfigError(f"Неизвестный вид приближения: {kind}")

    def _entropy(self) -> Dict[str, Any]:
        if self.config.input:
            data = self._dataset().values
            covariance = np.atleast_2d(np.cov(data, rowvar=False, bias=True))
            kappa3 = sample_cumulant_tensor(data, 3)
            return {
                'entropy': entropy_approx(covariance, kappa3),
                'entropy_printed': entropy_approx(covariance, kappa3, variant='printed'),
                'gaussian_entropy': gaussian_entropy(covariance),
            }
        model = self._document().model
        covariance = model.coefficient(1) * model.gamma
        return {
            'entropy': entropy_approx(covariance, model.cumulant_tensor(3)),
            'gaussian_entropy': gaussian_entropy(covariance),
        }

    def lancaster(self, point: Optional[Sequence[float]] = None, nodes: int = 32) -> Dict[str, Any]:
        """Мера Ланкастера в точке и интеграл Хёфдинга по данным"""
        data = self._dataset().values
        oracle = EmpiricalOracle(data)
        result: Dict[str, Any] = {}
        if point is not None:
            result['delta_f'] = lancaster_measure(oracle, np.asarray(point, dtype=float))
        if 2 <= data.shape[1] <= 3:
            with self.stats.stage('lancaster'):
                result['cumulant'] = cumulant_via_lancaster_integral(
                    oracle, grid_from_data(data, nodes), tolerance=1e-2, logger=self.logger
                )
            result['sample_cumulant'] = float(sample_cumulant_tensor(data, data.shape[1])[tuple(range(data.shape[1]))])
        elif point is None:
            raise ConfigError("Интеграл Ланкастера - для 2-3 столбцов; для других задайте --point")
        return result
