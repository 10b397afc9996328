#!/usr/bin/env python3
"""
Тесты командной строки: коды выхода, файлы результатов, воспроизводимость по seed
"""

import json
import math

import numpy as np
import pandas as pd
import pytest
from scipy import stats

from main import main
from models.cgf import EllipticalCgf
from models.document import ModelDocument
from models.mixture import GammaMixture
from simulation.sampler import sample_model

GAMMA = np.array([[1.0, 0.4, 0.2], [0.4, 1.0, 0.3], [0.2, 0.3, 1.0]])
# V ~ Gamma(2, 0.5): c1 = 1, c2 = 0.5
GENERATOR = EllipticalCgf(np.zeros(3), GAMMA, (1.0, 0.5))
GENERATOR_MIXTURE = GammaMixture.single(2.0, 0.5)


def run(capsys, *argv):
    """Код выхода и JSON со stdout"""
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.fixture(scope='module')
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp('cli')
    data = sample_model(GENERATOR, GENERATOR_MIXTURE, 5000, seed=31)
    pd.DataFrame(data, columns=['Y1', 'Y2', 'Y3']).to_csv(root / 'data.csv', index=False)
    code = main(['fit', '--input', str(root / 'data.csv'), '--orders', '2,4', '--components', '2',
                 '--starts', '4', '--output', str(root / 'fit')])
    assert code == 0
    return root


def test_ingest_minimal(tmp_path, capsys):
    (tmp_path / 'd.csv').write_text('1,2\n3,4\n', encoding='utf-8')
    code, result = run(capsys, 'ingest', '--input', str(tmp_path / 'd.csv'))
    assert code == 0
    assert result['success'] is True
    assert (result['summary']['n'], result['summary']['J']) == (2, 2)


def test_ingest_parse_error(tmp_path, capsys):
    (tmp_path / 'd.csv').write_text('1,2\nabc,4\n', encoding='utf-8')
    code, result = run(capsys, 'ingest', '--input', str(tmp_path / 'd.csv'))
    assert code == 1
    assert result['error'] == 'DataParseError'
    assert 'строка 2' in result['message'] and 'столбец 1' in result['message']


def test_missing_input_is_a_config_error(capsys):
    code, result = run(capsys, 'ingest')
    assert code == 1
    assert result['error'] == 'ConfigError'


@pytest.mark.parametrize('argv', [
    ('fit', '--orders'),
    ('simulate', '--n', 'abc'),
    ('approx', 'volume'),
    ('transform',),
])
def test_usage_errors_exit_with_input_code(capsys, argv):
    code, result = run(capsys, *argv)
    assert code == 1
    assert result['success'] is False
    assert result['error'] == 'ConfigError'
    assert result['exit_code'] == 1


def test_fit_writes_model_document(workspace):
    document = ModelDocument.load(str(workspace / 'fit' / 'model.json'))
    c1, c2 = document.model.coeffs
    assert c1 == pytest.approx(1.0, rel=0.1)
    assert c2 > 0
    assert document.mixture.n_components == 2
    assert document.diagnostics['columns'] == ['Y1', 'Y2', 'Y3']
    assert document.diagnostics['mixture_residual'] <= 1e-3


def test_fit_with_groups(workspace, tmp_path, capsys):
    code, result = run(capsys, 'fit', '--input', str(workspace / 'data.csv'), '--orders', '2,4',
                       '--components', '2', '--starts', '2', '--groups', '[[0,1],[2]]', '--output', str(tmp_path))
    assert code == 0
    groups = result['diagnostics']['groups']
    assert groups['sets'] == [[0, 1], [2]]
    covariance = groups['covariance']['0-1']
    assert covariance['analytic'] == pytest.approx(covariance['sample'], rel=0.15)


def test_fit_constant_column(tmp_path, capsys):
    data = np.random.default_rng(0).normal(size=(50, 2))
    data[:, 1] = 3.0
    pd.DataFrame(data, columns=['left', 'flat']).to_csv(tmp_path / 'd.csv', index=False)
    code, result = run(capsys, 'fit', '--input', str(tmp_path / 'd.csv'), '--output', str(tmp_path / 'out'))
    assert code == 1
    assert 'flat' in result['message']


def test_unknown_config_field(tmp_path, capsys):
    (tmp_path / 'config.json').write_text(json.dumps({'input': 'x.csv', 'colour': 'red'}), encoding='utf-8')
    code, result = run(capsys, 'ingest', '--config', str(tmp_path / 'config.json'))
    assert code == 1
    assert 'colour' in result['message']


def test_flags_override_config_file(workspace, tmp_path, capsys):
    (tmp_path / 'config.json').write_text(json.dumps({'input': 'missing.csv'}), encoding='utf-8')
    code, result = run(capsys, 'ingest', '--config', str(tmp_path / 'config.json'),
                       '--input', str(workspace / 'data.csv'))
    assert code == 0
    assert result['summary']['n'] == 5000


def simulate(capsys, workspace, output, *extra):
    return run(capsys, 'simulate', '--model', str(workspace / 'fit' / 'model.json'), '--seed', '7',
               '--n', '400', '--replicates', '6', '--block', '40', '--levels', '5,50,95',
               '--output', str(output), *extra)


def test_simulate_is_reproducible(workspace, tmp_path, capsys):
    first_code, first = simulate(capsys, workspace, tmp_path / 'a', '--workers', '1')
    second_code, second = simulate(capsys, workspace, tmp_path / 'b', '--workers', '3', '--save-samples')
    assert first_code == second_code == 0
    for name in ('bands.csv', 'blockmax.csv', 'replicates.csv'):
        assert (tmp_path / 'a' / name).read_bytes() == (tmp_path / 'b' / name).read_bytes()
    assert len(second['files']) == 4
    samples = pd.read_csv(tmp_path / 'b' / 'samples.csv')
    assert samples.shape == (400, 3)
    bands = pd.read_csv(tmp_path / 'a' / 'bands.csv')
    assert list(bands.columns) == ['level', 'lower', 'upper', 'observed', 'cornish_fisher']


def test_simulate_requires_seed(workspace, tmp_path, capsys):
    code, result = run(capsys, 'simulate', '--model', str(workspace / 'fit' / 'model.json'),
                       '--output', str(tmp_path))
    assert code == 1
    assert 'seed' in result['message']


def test_report(workspace, tmp_path, capsys):
    code, result = run(capsys, 'report', '--model', str(workspace / 'fit' / 'model.json'),
                       '--input', str(workspace / 'data.csv'), '--seed', '3', '--n', '5000',
                       '--replicates', '20', '--block', '250', '--output', str(tmp_path))
    assert code == 0
    assert result['levels'] == 18
    assert 0 <= result['covered'] <= 18
    text = (tmp_path / 'report.txt').read_text(encoding='utf-8')
    assert 'Квантиль' in text and 'по блокам из 250' in text


def test_report_block_larger_than_data(workspace, tmp_path, capsys):
    code, result = run(capsys, 'report', '--model', str(workspace / 'fit' / 'model.json'),
                       '--input', str(workspace / 'data.csv'), '--seed', '3', '--block', '10000',
                       '--output', str(tmp_path))
    assert code == 1
    assert result['error'] == 'ConfigError'


@pytest.fixture
def gaussian_model(tmp_path):
    path = tmp_path / 'gauss.json'
    path.write_text(json.dumps({'m': [0.0, 1.0], 'Gamma': [1.0, 0.3, 0.3, 2.0], 'coeffs': [1.0]}), encoding='utf-8')
    return str(path)


def test_approx_gaussian_density(gaussian_model, capsys):
    code, result = run(capsys, 'approx', 'density', '--model', gaussian_model, '--point', '0.5,0.2')
    assert code == 0
    expected = stats.multivariate_normal([0.0, 1.0], [[1.0, 0.3], [0.3, 2.0]]).pdf([0.5, 0.2])
    assert result['density'] == pytest.approx(expected, rel=1e-10)
    code, result = run(capsys, 'approx', 'density', '--model', gaussian_model, '--point', '0.5,0.2',
                       '--method', 'edgeworth')
    assert result['density'] == pytest.approx(expected, rel=1e-10)


def test_approx_density_of_marginal(gaussian_model, capsys):
    expected = stats.norm(1.0, math.sqrt(2.0)).pdf(0.2)
    for method in ('saddlepoint', 'edgeworth'):
        code, result = run(capsys, 'approx', 'density', '--model', gaussian_model, '--subset', '1',
                           '--point', '0.2', '--method', method)
        assert code == 0
        assert result['subset'] == [1]
        assert result['density'] == pytest.approx(expected, rel=1e-10)


def test_approx_gaussian_entropy(gaussian_model, capsys):
    code, result = run(capsys, 'approx', 'entropy', '--model', gaussian_model)
    assert code == 0
    closed_form = 0.5 * math.log(2.0 - 0.09) + math.log(2.0 * math.pi) + 1.0
    assert result['entropy'] == pytest.approx(closed_form, abs=1e-12)


def test_approx_quantile_and_cdf(gaussian_model, capsys):
    code, result = run(capsys, 'approx', 'quantile', '--model', gaussian_model, '--p', '0.975')
    assert code == 0
    # S = Y1 + Y2 ~ N(1, 3.6)
    assert result['quantile'] == pytest.approx(1.0 + 1.959964 * math.sqrt(3.6), abs=1e-5)
    code, result = run(capsys, 'approx', 'cdf', '--model', gaussian_model, '--x0', '1.0')
    assert result['cdf'] == pytest.approx(0.5, abs=1e-9)


def test_approx_errors(gaussian_model, capsys):
    code, result = run(capsys, 'approx', 'density', '--model', gaussian_model)
    assert code == 1
    code, result = run(capsys, 'approx', 'quantile', '--model', gaussian_model, '--p', '1.5')
    assert code == 1
    assert result['error'] == 'DomainError'


def test_lancaster_command(tmp_path, capsys):
    data = np.random.default_rng(4).multivariate_normal([0.0, 0.0], [[1.0, 0.6], [0.6, 1.0]], size=400)
    pd.DataFrame(data, columns=['a', 'b']).to_csv(tmp_path / 'd.csv', index=False)
    code, result = run(capsys, 'lancaster', '--input', str(tmp_path / 'd.csv'), '--point', '0,0')
    assert code == 0
    assert result['cumulant'] == pytest.approx(result['sample_cumulant'], abs=0.05)
    assert -0.25 <= result['delta_f'] <= 0.25
