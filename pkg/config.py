# config.py
"""
Конфигурационный файл для cgf-lab
"""

import os
from dotenv import load_dotenv

# Загружаем переменные окружения из .env файла рядом с этим файлом
dotenv_path = os.path.join(os.path.dirname(os.path.abspath(__file__)), '.env')
load_dotenv(dotenv_path)

# Логирование
LOG_LEVEL = os.getenv('LOG_LEVEL') or 'INFO'
LOG_FILE = os.getenv('LOG_FILE')

# Параллелизм: пусто = все ядра
CGFLAB_THREADS = int(os.getenv('CGFLAB_THREADS')) if os.getenv('CGFLAB_THREADS') else None

# Каталог для результатов
OUTPUT_DIR = os.getenv('CGFLAB_OUTPUT_DIR') or 'out'

# Решение седловой точки (метод Ньютона)
NEWTON_MAX_ITER = int(os.getenv('NEWTON_MAX_ITER') or '100')
NEWTON_TOL = float(os.getenv('NEWTON_TOL') or '1e-10')

# Подгонка смеси гамма-распределений
MIXTURE_COMPONENTS = int(os.getenv('MIXTURE_COMPONENTS') or '5')
MIXTURE_STARTS = int(os.getenv('MIXTURE_STARTS') or '16')
MIXTURE_TARGET_RESIDUAL = 1e-4
MIXTURE_MAX_RESIDUAL = 1e-3

# Монте-Карло
BAND_PROBABILITY = float(os.getenv('BAND_PROBABILITY') or '0.95')
DEFAULT_ORDERS = (2, 4, 6)
DEFAULT_BLOCK = 365  # годовые максимумы для суточных данных
DEFAULT_SAMPLE_SIZE = 10950
DEFAULT_REPLICATES = 1000

# Уровни квантилей (в процентах) для отчёта по суммам
DEFAULT_QUANTILE_LEVELS = (
    0.0, 0.1, 0.5, 1.0, 5.0, 10.0, 20.0, 25.0, 50.0,
    75.0, 80.0, 90.0, 95.0, 99.0, 99.5, 99.9, 99.99, 100.0,
)
