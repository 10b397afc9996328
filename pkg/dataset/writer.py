"""
Запись результатов: CSV (pandas), JSON и текстовый отчёт
"""

import json
import math
import os
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from simulation.bands import BlockMaximaBands, QuantileBands

FLOAT_FORMAT = '%.10g'
PRINTED_LOWER_HEADER = '2.75%'


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def write_csv(frame: pd.DataFrame, path: str, float_format: Optional[str] = FLOAT_FORMAT) -> str:
    frame.to_csv(path, index=False, float_format=float_format, lineterminator='\n')
    return path


def write_json(data: Dict[str, Any], path: str) -> str:
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
        f.write('\n')
    return path


def write_text(text: str, path: str) -> str:
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(text)
    return path


def samples_frame(samples: np.ndarray, columns: Sequence[str]) -> pd.DataFrame:
    return pd.DataFrame(samples, columns=list(columns))


def _cell(value: Optional[float], width: int = 14) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return '-'.rjust(width)
    return f'{value:{width}.4f}'


def render_bands_table(bands: QuantileBands, cornish_fisher: Optional[Sequence[float]] = None) -> List[str]:
    """Таблица: уровень, нижняя и верхняя граница, наблюдение, Корниш-Фишер"""
    low, high = (100.0 * q for q in (0.5 * (1 - bands.band_probability), 0.5 * (1 + bands.band_probability)))
    header = (f"{'Квантиль':>10}{f'{low:g}%':>14}{f'{high:g}%':>14}"
              f"{'Наблюдение':>14}{'Корниш-Фишер':>14}")
    lines = [header, '-' * len(header)]
    for i, level in enumerate(bands.levels):
        observed = None if bands.observed is None else float(bands.observed[i])
        cf = None if cornish_fisher is None else cornish_fisher[i]
        mark = ''
        if observed is not None and not (bands.lower[i] <= observed <= bands.upper[i]):
            mark = '  *'
        lines.append(
            f"{f'{100.0 * level:g}%':>10}{_cell(float(bands.lower[i]))}{_cell(float(bands.upper[i]))}"
            f"{_cell(observed)}{_cell(cf)}{mark}"
        )
    return lines


def render_report(bands: Optional[QuantileBands], cornish_fisher: Optional[Sequence[float]],
                  maxima: Optional[BlockMaximaBands], block: Optional[int],
                  diagnostics: Dict[str, Any], summary: Dict[str, Any]) -> str:
    """Текст report.txt; содержит только детерминированные величины"""
    lines = ['ОТЧЁТ cgf-lab', '=' * 60, '']
    if bands is not None:
        lines.append(f'Квантили суммы S и полосы {100 * bands.band_probability:g}% по репликам Монте-Карло')
        lines.append(
            f'Нижняя граница считается на уровне {50 * (1 - bands.band_probability):g}% '
            f'(в исходной таблице заголовок "{PRINTED_LOWER_HEADER}")'
        )
        lines.extend(render_bands_table(bands, cornish_fisher))
        if bands.observed is not None:
            covered = int(np.sum(bands.covered()))
            lines.append(f'Наблюдение внутри полосы: {covered} из {len(bands.levels)} уровней (* - вне полосы)')
        lines.append('')
    if maxima is not None:
        lines.append(f'ЭФР максимумов по блокам из {block} наблюдений')
        width = maxima.upper - maxima.lower
        lines.append(f'  сетка: {maxima.grid[0]:.4f} .. {maxima.grid[-1]:.4f} ({maxima.grid.size} точек)')
        lines.append(f'  средняя ширина полосы: {float(np.mean(width)):.4f}')
        if maxima.observed is not None:
            inside = np.mean((maxima.lower <= maxima.observed) & (maxima.observed <= maxima.upper))
            lines.append(f'  наблюдаемая ЭФР внутри полосы: {100 * float(inside):.1f}% точек сетки')
        lines.append('')
    if diagnostics:
        lines.append('Диагностика')
        for key, value in diagnostics.items():
            lines.append(f'  {key}: {_format_value(value)}')
        lines.append('')
    lines.append('Запуск')
    for key, value in summary.items():
        lines.append(f'  {key}: {value}')
    return '\n'.join(lines) + '\n'


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return f'{value:.6g}'
    if isinstance(value, (list, tuple)):
        return ', '.join(_format_value(v) for v in value)
    if isinstance(value, dict):
        return '; '.join(f'{k}={_format_value(v)}' for k, v in value.items())
    return str(value)
