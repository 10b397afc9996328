"""
Размер пула воркеров
"""

import os
from typing import Optional

from config import CGFLAB_THREADS


def resolve_workers(requested: Optional[int] = None) -> int:
    """Число потоков: явный запрос, иначе CGFLAB_THREADS, иначе все ядра"""
    cores = os.cpu_count() or 1
    limit = requested or CGFLAB_THREADS or cores
    return max(1, min(int(limit), cores))
