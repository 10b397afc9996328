"""
Модуль для настройки логирования
"""

import logging
import sys
from typing import Optional

from config import LOG_LEVEL, LOG_FILE

LOGGER_NAME = 'cgflab'


def get_logger() -> logging.Logger:
    """Возвращает общий логгер пакета"""
    return logging.getLogger(LOGGER_NAME)


def setup_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> logging.Logger:
    """Настройка логирования из конфига (аргументы имеют приоритет)"""
    level_name = (level or LOG_LEVEL or 'INFO').upper()
    log_level = getattr(logging, level_name, logging.INFO)
    log_file = log_file or LOG_FILE

    logger = get_logger()
    logger.setLevel(log_level)

    # Удаляем существующие обработчики
    logger.handlers.clear()

    # Форматтер
    formatter = logging.Formatter('%(asctime)s - %(levelname)s - %(message)s')

    # Файловый обработчик, только если файл задан
    if log_file:
        try:
            file_handler = logging.FileHandler(log_file, encoding='utf-8')
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)
            logger.info(f"Логирование в файл: {log_file}")
        except Exception as e:
            logger.warning(f"Не удалось настроить файловое логирование: {e}")

    # Консольный обработчик (stderr: stdout занят выводом команд)
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    logger.debug(f"Логирование настроено. Уровень: {level_name}")
    return logger
