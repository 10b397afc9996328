#!/usr/bin/env python3
"""
Тесты чтения CSV, записи результатов и текстового отчёта
"""

import json

import numpy as np
import pandas as pd
import pytest

from dataset.reader import read_dataset
from dataset.writer import render_bands_table, render_report, write_csv, write_json
from models.cgf import EllipticalCgf
from models.document import ModelDocument
from models.mixture import GammaMixture
from simulation.bands import BlockMaximaBands, QuantileBands
from utils.errors import ConfigError, DataParseError, DomainError


def write(tmp_path, text, name='data.csv'):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return str(path)


def test_minimal_file(tmp_path):
    dataset = read_dataset(write(tmp_path, "1,2\n3,4\n"))
    assert (dataset.n, dataset.dimension) == (2, 2)
    assert dataset.columns == ['X1', 'X2']
    np.testing.assert_array_equal(dataset.values, [[1.0, 2.0], [3.0, 4.0]])


def test_header_is_detected(tmp_path):
    dataset = read_dataset(write(tmp_path, "a, b ,c\n1,2,3\n4,5,6\n7,8,9\n"))
    assert dataset.columns == ['a', 'b', 'c']
    assert dataset.n == 3
    assert dataset.select(['c', '0']).columns == ['c', 'a']


def test_blank_lines_are_skipped(tmp_path):
    dataset = read_dataset(write(tmp_path, "1,2\n\n3,4\n"))
    assert dataset.n == 2


def test_non_numeric_cell_reports_coordinates(tmp_path):
    with pytest.raises(DataParseError) as info:
        read_dataset(write(tmp_path, "1,2\n3,abc\n"))
    assert (info.value.row, info.value.column) == (2, 2)
    assert 'abc' in str(info.value)


@pytest.mark.parametrize('cell', ['nan', 'inf', '-inf'])
def test_non_finite_cells_are_rejected(tmp_path, cell):
    with pytest.raises(DataParseError) as info:
        read_dataset(write(tmp_path, f"1,2\n{cell},4\n"))
    assert (info.value.row, info.value.column) == (2, 1)


def test_ragged_and_empty_files(tmp_path):
    with pytest.raises(DataParseError):
        read_dataset(write(tmp_path, "1,2\n3,4,5\n"))
    with pytest.raises(DataParseError):
        read_dataset(write(tmp_path, "1,2,3\n3,4\n"))
    with pytest.raises(DataParseError):
        read_dataset(write(tmp_path, ""))
    with pytest.raises(DataParseError):
        read_dataset(write(tmp_path, "a,b\n"))
    with pytest.raises(DataParseError):
        read_dataset(str(tmp_path / 'missing.csv'))


def test_unknown_column(tmp_path):
    dataset = read_dataset(write(tmp_path, "1,2\n3,4\n"))
    with pytest.raises(DataParseError):
        dataset.select(['Z'])


def test_summary(tmp_path):
    summary = read_dataset(write(tmp_path, "x,y\n1,0\n2,0\n3,3\n")).summary()
    assert summary['n'] == 3 and summary['J'] == 2
    x, y = summary['columns']
    assert x['mean'] == pytest.approx(2.0)
    assert x['variance'] == pytest.approx(1.0)
    assert x['skewness'] == pytest.approx(0.0, abs=1e-12)
    assert y['skewness'] > 0


def test_model_document_round_trip(tmp_path):
    model = EllipticalCgf([0.1, -0.2], np.array([[1.0, 0.25], [0.25, 2.0]]), (0.999, 0.1101, 0.1332))
    document = ModelDocument(model, GammaMixture([0.4, 0.6], [2.0, 3.0], [0.5, 0.25]), {'n': 10})
    path = document.save(str(tmp_path / 'nested' / 'model.json'))
    restored = ModelDocument.load(path)
    np.testing.assert_array_equal(restored.model.gamma, model.gamma)
    assert restored.model.coeffs == model.coeffs
    assert restored.mixture.to_dict() == document.mixture.to_dict()
    assert restored.diagnostics == {'n': 10}


def test_flat_model_document(tmp_path):
    path = write(tmp_path, json.dumps({'m': [0.0], 'Gamma': [2.0], 'coeffs': [1.0]}), 'flat.json')
    document = ModelDocument.load(path)
    assert document.mixture is None
    assert document.model.gamma[0, 0] == 2.0


def test_broken_model_documents(tmp_path):
    with pytest.raises(ConfigError):
        ModelDocument.load(str(tmp_path / 'none.json'))
    with pytest.raises(ConfigError):
        ModelDocument.load(write(tmp_path, '{', 'bad.json'))
    with pytest.raises(DomainError):
        ModelDocument.load(write(tmp_path, '[1, 2]', 'list.json'))


def test_csv_and_json_writers(tmp_path):
    frame = pd.DataFrame({'level': [0.5], 'lower': [1.0 / 3.0]})
    text = open(write_csv(frame, str(tmp_path / 'f.csv')), encoding='utf-8').read()
    assert text == 'level,lower\n0.5,0.3333333333\n'
    path = write_json({'value': 'τ'}, str(tmp_path / 'f.json'))
    assert json.load(open(path, encoding='utf-8')) == {'value': 'τ'}


def make_bands():
    return QuantileBands(
        levels=[0.05, 0.5],
        lower=np.array([-10.0, -0.2]),
        upper=np.array([-9.0, 0.2]),
        band_probability=0.95,
        observed=np.array([-9.5, 0.4]),
    )


def test_bands_table_marks_misses():
    lines = render_bands_table(make_bands(), cornish_fisher=[-9.6, 0.0])
    assert '2.5%' in lines[0] and '97.5%' in lines[0]
    assert not lines[2].endswith('*')
    assert lines[3].endswith('*')


def test_report_text():
    maxima = BlockMaximaBands(np.linspace(0.0, 1.0, 5), np.zeros(5), np.ones(5), np.full(5, 0.5))
    text = render_report(make_bands(), None, maxima, 365, {'gamma_total': 37.325}, {'command': 'report'})
    assert 'Наблюдение внутри полосы: 1 из 2' in text
    assert '2.75%' in text
    assert 'по блокам из 365 наблюдений' in text
    assert 'gamma_total: 37.325' in text
    assert text.endswith('command: report\n')
