"""
Модуль для работы со статистикой запуска
"""

import time
from contextlib import contextmanager
from datetime import datetime
from typing import Any, Dict


class Statistics:
    """Класс для сбора и отображения статистики запуска команды"""

    def __init__(self, command: str = ''):
        self.stats = {
            'command': command,
            'started_at': datetime.now().isoformat(),
            'finished_at': None,
            'stages': {},
            'observations': 0,
            'columns': 0,
            'replicates': 0,
            'samples_drawn': 0,
            'files_written': [],
            'warnings': 0,
            'failed': False,
        }

    @contextmanager
    def stage(self, name: str):
        """Замер длительности этапа"""
        started = time.perf_counter()
        try:
            yield
        finally:
            self.stats['stages'][name] = self.stats['stages'].get(name, 0.0) + time.perf_counter() - started

    def record_dataset(self, n: int, dimension: int):
        """Запоминает размер входных данных"""
        self.stats['observations'] = n
        self.stats['columns'] = dimension

    def record_simulation(self, replicates: int, n_per_sample: int):
        """Увеличивает счётчики Монте-Карло"""
        self.stats['replicates'] += replicates
        self.stats['samples_drawn'] += replicates * n_per_sample

    def record_file(self, path: str):
        self.stats['files_written'].append(path)

    def increment_warnings(self):
        self.stats['warnings'] += 1

    def mark_failed(self):
        self.stats['failed'] = True

    def finish(self):
        self.stats['finished_at'] = datetime.now().isoformat()

    def summary(self) -> Dict[str, Any]:
        """Детерминированная часть статистики (без времени) для файлов отчёта"""
        return {
            'command': self.stats['command'],
            'observations': self.stats['observations'],
            'columns': self.stats['columns'],
            'replicates': self.stats['replicates'],
            'samples_drawn': self.stats['samples_drawn'],
        }

    def get_stats(self) -> Dict[str, Any]:
        """Возвращает копию статистики"""
        return dict(self.stats)

    def print_stats(self, detailed: bool = False):
        """Вывод статистики"""
        print("\n" + "=" * 60)
        print(f"📊 СТАТИСТИКА ЗАПУСКА: {self.stats['command']}")
        print("=" * 60)
        if self.stats['observations']:
            print(f"Наблюдений: {self.stats['observations']} × {self.stats['columns']}")
        if self.stats['replicates']:
            print(f"Реплик Монте-Карло: {self.stats['replicates']}")
            print(f"Сгенерировано строк: {self.stats['samples_drawn']}")
        print(f"Записано файлов: {len(self.stats['files_written'])}")
        print(f"Предупреждений: {self.stats['warnings']}")
        print(f"Статус: {'ошибка' if self.stats['failed'] else 'успех'}")
        print(f"Время запуска: {self.stats['started_at'][11:19]}")

        if detailed:
            if self.stats['stages']:
                print("\n⏱ Этапы:")
                for name, seconds in self.stats['stages'].items():
                    print(f"  {name}: {seconds:.2f} с")
            for path in self.stats['files_written']:
                print(f"  → {path}")
        print("=" * 60)
