#!/usr/bin/env python3
"""
Главный файл запуска cgf-lab
"""

import argparse
import contextlib
import json
import math
import sys

from config import CGFLAB_THREADS, LOG_LEVEL, OUTPUT_DIR
from lab import CgfLab
from models.run_config import RunConfig
from utils.errors import ConfigError
from utils.logger import setup_logging
from utils.stats import Statistics

# поля RunConfig, которые можно переопределить флагами
OVERRIDE_FIELDS = (
    'input', 'model', 'columns', 'groups', 'orders', 'components', 'starts', 'n', 'replicates',
    'seed', 'levels', 'block', 'band_probability', 'output', 'workers', 'save_samples',
)


def print_config(config: RunConfig):
    """Вывод конфигурации"""
    print("\n" + "=" * 60, file=sys.stderr)
    print("⚙️  НАСТРОЙКИ CGF-LAB", file=sys.stderr)
    print("=" * 60, file=sys.stderr)
    print(f"Входные данные: {config.input or '-'}", file=sys.stderr)
    print(f"Модель: {config.model or '-'}", file=sys.stderr)
    print(f"Каталог результатов: {config.output}", file=sys.stderr)
    print(f"Порядки кумулянтов: {config.orders}", file=sys.stderr)
    print(f"Компонент смеси: {config.components}, стартов: {config.starts}", file=sys.stderr)
    print(f"Монте-Карло: n={config.n}, реплик={config.replicates}, seed={config.seed}", file=sys.stderr)
    print(f"Потоков: {config.workers or CGFLAB_THREADS or 'все ядра'}", file=sys.stderr)
    print("=" * 60 + "\n", file=sys.stderr)


class LabArgumentParser(argparse.ArgumentParser):
    """argparse с ошибками разбора в виде ConfigError (код выхода 1, JSON на stdout)"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise ConfigError(f"{self.prog}: {message}")


def _json_list(text: str):
    try:
        value = json.loads(text)
    except json.JSONDecodeError as e:
        raise argparse.ArgumentTypeError(f"ожидался JSON-список: {e}")
    if not isinstance(value, list):
        raise argparse.ArgumentTypeError("ожидался JSON-список")
    return value


def _float_list(text: str):
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _int_list(text: str):
    try:
        return [int(v) for v in text.split(',') if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def add_common_arguments(parser: argparse.ArgumentParser):
    """Флаги с именами полей RunConfig; значение None - не переопределять файл"""
    parser.add_argument('--config', help='JSON-файл конфигурации запуска')
    parser.add_argument('--input', help='CSV с наблюдениями')
    parser.add_argument('--model', help='Документ модели model.json')
    parser.add_argument('--columns', type=lambda s: [c for c in s.split(',') if c],
                        help='Столбцы через запятую (имена или номера)')
    parser.add_argument('--groups', type=_json_list, help='Группы индексов, например [[0,1,2],[3,4]]')
    parser.add_argument('--orders', type=_int_list, help='Порядки кумулянтов суммы, например 2,4,6')
    parser.add_argument('--components', type=int, help='Число компонент смеси гамма-распределений')
    parser.add_argument('--starts', type=int, help='Число стартов подгонки смеси')
    parser.add_argument('--n', type=int, help='Размер выборки в реплике')
    parser.add_argument('--replicates', type=int, help='Число реплик Монте-Карло')
    parser.add_argument('--seed', type=int, help='Seed генератора (обязателен для simulate/report)')
    parser.add_argument('--levels', type=_float_list, help='Уровни квантилей в процентах через запятую')
    parser.add_argument('--block', type=int, help='Размер блока для максимумов (0 - без блоков)')
    parser.add_argument('--band-probability', dest='band_probability', type=float,
                        help='Вероятность доверительной полосы')
    parser.add_argument('--output', help=f'Каталог результатов (по умолчанию: {OUTPUT_DIR})')
    parser.add_argument('--workers', type=int, help='Число потоков')
    parser.add_argument('--save-samples', dest='save_samples', action='store_true', default=None,
                        help='Сохранить первую реплику в samples.csv')
    parser.add_argument('--log-level', dest='log_level', default=LOG_LEVEL, help='Уровень логирования')
    parser.add_argument('--log-file', dest='log_file', help='Файл лога')
    parser.add_argument('--show-config', dest='show_config', action='store_true',
                        help='Показать настройки перед запуском')
    parser.add_argument('--stats', action='store_true', help='Показать статистику запуска')


def build_parser() -> argparse.ArgumentParser:
    parser = LabArgumentParser(
        prog='cgf-lab',
        description='cgf-lab - модели взаимозависимости через производящую функцию кумулянтов',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Примеры использования:
  %(prog)s ingest --input data.csv
  %(prog)s fit --input data.csv --orders 2,4,6 --output out
  %(prog)s simulate --model out/model.json --seed 7 --replicates 200
  %(prog)s report --model out/model.json --input data.csv --seed 7
  %(prog)s approx density --model out/model.json --point 0.5,1.0
  %(prog)s approx cdf --model out/model.json --x0 30
  %(prog)s lancaster --input data.csv --columns 1,2

Коды выхода:
  0 - успех, 1 - ошибка входных данных, 2 - численная ошибка, 3 - внутренняя ошибка
        """
    )
    commands = parser.add_subparsers(dest='command', required=True)

    for name, help_text in (
        ('ingest', 'Сводка по CSV: n, J, среднее, дисперсия, асимметрия'),
        ('fit', 'Оценка Γ, коэффициентов c_r и смеси V'),
        ('simulate', 'Реплики Монте-Карло и полосы'),
        ('report', 'Полосы против наблюдений, report.txt'),
    ):
        add_common_arguments(commands.add_parser(name, help=help_text))

    approx = commands.add_parser('approx', help='Приближения плотности, хвоста, квантиля, энтропии')
    approx.add_argument('kind', choices=('density', 'tail', 'quantile', 'cdf', 'entropy'))
    approx.add_argument('--point', type=_float_list, help='Точка для плотности')
    approx.add_argument('--subset', type=_int_list, help='Индексы компонент (по умолчанию все)')
    approx.add_argument('--thresholds', type=_float_list, help='Пороги для хвоста')
    approx.add_argument('--x0', type=float, help='Точка для функции распределения суммы')
    approx.add_argument('--p', type=float, help='Вероятность для квантиля')
    approx.add_argument('--method', choices=('saddlepoint', 'edgeworth'), default='saddlepoint')
    add_common_arguments(approx)

    lancaster = commands.add_parser('lancaster', help='Мера Ланкастера и интеграл Хёфдинга по данным')
    lancaster.add_argument('--point', type=_float_list, help='Точка для ΔF')
    lancaster.add_argument('--nodes', type=int, default=32, help='Узлов сетки на ось')
    add_common_arguments(lancaster)
    return parser


def command_kwargs(args: argparse.Namespace) -> dict:
    if args.command == 'approx':
        return {'kind': args.kind, 'point': args.point, 'subset': args.subset,
                'thresholds': args.thresholds, 'x0': args.x0, 'p': args.p, 'method': args.method}
    if args.command == 'lancaster':
        return {'point': args.point, 'nodes': args.nodes}
    return {}


def _printable(value):
    """NaN/Inf -> null: stdout остаётся корректным JSON"""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _printable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_printable(v) for v in value]
    return value


def _config_failure(e: ConfigError) -> int:
    print(json.dumps({'success': False, 'error': 'ConfigError', 'message': str(e),
                      'exit_code': e.exit_code}, ensure_ascii=False))
    return e.exit_code


def main(argv=None) -> int:
    """Основная функция запуска"""
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as e:
        return _config_failure(e)
    logger = setup_logging(args.log_level, args.log_file)
    stats = Statistics(args.command)

    overrides = {name: getattr(args, name, None) for name in OVERRIDE_FIELDS}
    try:
        config = RunConfig.load(args.config, overrides)
    except ConfigError as e:
        logger.error(f"[CONFIG] {e}")
        return _config_failure(e)

    if args.show_config:
        print_config(config)

    lab = CgfLab(config, logger, stats)
    result = lab.run(args.command, **command_kwargs(args))
    print(json.dumps(_printable(result), indent=2, ensure_ascii=False, default=str))

    if args.stats:
        # stdout занят JSON-результатом
        with contextlib.redirect_stdout(sys.stderr):
            stats.print_stats(detailed=True)
    return result.get('exit_code', 0)


if __name__ == "__main__":
    sys.exit(main())
