"""
Black-box tests for the command line front end and the command dispatcher.
"""
import json
import os

import pytest
import yaml

from scripts.stability import main, merge_negative_values
from src.commands import CommandRequest, run
from src.errors import StabilityError
from src.utils import parse_rational

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


@pytest.fixture
def config_file(tmp_path):
    """Project configuration with file logging switched off."""
    with open(os.path.join(PROJECT_ROOT, 'config', 'config.yaml'), 'r') as f:
        config = yaml.safe_load(f)
    config['logging']['file'] = ''
    config['figures']['presets'] = os.path.join(PROJECT_ROOT, 'config', 'figures.yaml')
    path = tmp_path / 'config.yaml'
    path.write_text(yaml.safe_dump(config))
    return str(path)


@pytest.fixture
def cli(config_file, capsys):
    """Run the CLI; returns (exit status, parsed stdout or None, last stderr line)."""
    def invoke(*argv):
        status = main(['--config', config_file, *argv])
        captured = capsys.readouterr()
        document = json.loads(captured.out) if captured.out.strip() else None
        lines = captured.err.strip().splitlines()
        return status, document, lines[-1] if lines else ''
    return invoke


def test_merge_negative_values():
    assert merge_negative_values(['slope', 'nu', '--beta', '-1/2', '--ch', '1,0,0,0']) == \
        ['slope', 'nu', '--beta=-1/2', '--ch', '1,0,0,0']
    assert merge_negative_values(['--v', '-2,0,2,0']) == ['--v=-2,0,2,0']


def test_slope_lambda(cli):
    status, document, _ = cli('slope', 'lambda', '--ch', '0,1,-1/2,1/6', '--beta', '-2', '--alpha2', '1',
                              '--s', '1/3')
    assert status == 0
    assert document['value'] == '4/9'
    assert document['schema_version'] == 1
    assert document['command'] == 'slope lambda'


def test_alpha_is_squared(cli):
    _, with_alpha, _ = cli('slope', 'nu', '--ch', '1,0,0,0', '--beta', '-1', '--alpha', '1/2')
    _, with_alpha2, _ = cli('slope', 'nu', '--ch', '1,0,0,0', '--beta', '-1', '--alpha2', '1/4')
    assert with_alpha['value'] == with_alpha2['value'] == '3/8'


def test_slope_mu_infinite(cli):
    status, document, _ = cli('slope', 'mu', '--ch', '0,0,2,3')
    assert status == 0
    assert document['value'] == 'inf'


def test_wall_section(cli):
    status, document, _ = cli('wall', 'section', '--v', '1,3,9/2,9/2', '--w', '0,0,2,3', '--s', '1/3',
                              '--beta', '3/2')
    assert status == 0
    assert document['a'] == ['3/4']
    assert document['roots'][0]['alpha_decimal'] == '0.866025403784'


def test_wall_tilt_and_apex(cli):
    _, wall, _ = cli('wall', 'tilt', '--v', '1,0,0,0', '--w', '0,1,-1/2,1/6')
    assert (wall['kind'], wall['center'], wall['radius2']) == ('Semicircle', '-1/2', '1/4')
    _, apex, _ = cli('wall', 'apex', '--v', '1,0,0,0', '--w', '0,1,-1/2,1/6')
    assert (apex['beta'], apex['a'], apex['alpha_decimal']) == ('-1/2', '1/4', '0.5')


def test_chern_commands(cli):
    assert cli('chern', 'dual', '--ch', '0,0,2,-3')[1]['value'] == ['0', '0', '2', '3']
    assert cli('chern', 'twist', '--ch', '0,1,-1/2,1/6', '--beta', '-2')[1]['value'] == ['0', '1', '3/2', '7/6']
    assert cli('chern', 'tensor', '--ch', '1,0,0,0', '--k', '3')[1]['value'] == ['1', '3', '9/2', '9/2']
    assert cli('chern', 'delta', '--ch', '1,0,0,0', '--w', '0,1,0,0', '--i', '1', '--j', '0')[1]['value'] == '-1'
    assert cli('chern', 'qtilt', '--ch', '2,0,-2,0')[1]['value'] == '8'


def test_hilbert(cli):
    _, document, _ = cli('hilbert', '--ch', '0,1,-3/2,7/6', '--k', '2')
    assert document['coefficients'] == {'c3': '0', 'c2': '1/2', 'c1': '1/2', 'c0': '0'}
    assert document['reduced'] == 't**2 + t'


def test_region(cli):
    assert cli('region', '--ch', '1,0,0,0', '--beta', '-1', '--alpha2', '1/4')[1]['shift'] == 0


def test_curve_with_section(cli):
    _, document, _ = cli('curve', 'theta', '--w', '2,0,-2,0', '--beta', '2')
    assert document['kind'] == 'ThetaCurve'
    assert document['section']['a'] == ['2']


def test_enumerate(cli):
    status, document, _ = cli('enumerate', '--v', '2,0,-2,0', '--beta-min', '-3', '--beta-max', '0',
                              '--max-qtilt', '16', '--max-rank', '3', '--workers', '2')
    assert status == 0
    assert document['count'] == len(document['walls'])
    assert any(w['center'] == '-3/2' and w['radius2'] == '1/4' for w in document['walls'])


def test_asym_commands(cli, tmp_path):
    _, compared, _ = cli('asym', 'compare', '--side', 'left', '--s', '1/3', '--v', '0,1,-1/2,1/6',
                         '--u', '0,0,1,-1')
    assert compared == {**compared, 'sign': 'Less', 'order': 1, 'leading': '-1/2'}

    candidates = tmp_path / 'candidates.txt'
    candidates.write_text("# quotients of the dual conic\n0,0,1,1\n\n")
    status, verdict, _ = cli('asym', 'classify', '--side', 'right', '--s', '1/3', '--v', '0,0,2,3',
                             '--candidates', str(candidates))
    assert status == 0
    assert verdict['verdict'] == 'destabilized'
    assert verdict['by'] == ['0', '0', '1', '1']

    _, limit, _ = cli('asym', 'limit', '--side', 'left', '--cgamma', '1/4', '--v', '1,0,0,0')
    assert limit['value'] == '3/8'

    _, gs, _ = cli('asym', 'gs', '--v', '0,0,2,-3', '--u', '0,0,1,-1', '--k', '1')
    assert gs['ordering'] == 'Less'

    _, series, _ = cli('asym', 'series', '--side', 'left', '--s', '1/3', '--v', '0,0,2,3', '--depth', '2')
    assert series['terms'] == [{'power': 1, 'coeff': '-1'}, {'power': 0, 'coeff': '3/2'}]


def test_plot_csv(cli, tmp_path):
    out = tmp_path / 'figures' / 'figure3.csv'
    status, document, _ = cli('plot', '--figure', 'figure3', '--out', str(out))
    assert status == 0
    assert document['format'] == 'csv'
    assert out.read_text().splitlines()[0] == 'curve_id,beta,alpha'


def test_plot_svg(cli, tmp_path):
    out = tmp_path / 'figure1.svg'
    assert cli('plot', '--figure', 'figure1', '--out', str(out))[0] == 0
    assert out.read_bytes().lstrip().startswith(b'<?xml')


def test_domain_error_exit_code(cli):
    status, document, last = cli('chern', 'parse', '--ch', '1,0,1/3,0')
    assert status == 2
    assert document is None
    error = json.loads(last)['error']
    assert error['code'] == 'DenominatorViolation'
    assert 'ch2' in error['message']


@pytest.mark.parametrize("argv", [
    ('slope', 'mu', '--ch', '1,0,0,0', '--beta', '0'),
    ('slope', 'lambda', '--ch', '1,0,0,0', '--beta', '0', '--alpha2', '1'),
    ('slope', 'nu', '--ch', '1,0,0,0', '--beta', '0', '--alpha2', '1', '--alpha', '1'),
    ('volume', '--ch', '1,0,0,0'),
    ('plot', '--figure', 'figure1', '--out', 'figure.png'),
    ('asym', 'compare', '--side', 'up', '--s', '1', '--v', '0,1,0,0', '--u', '0,0,1,0'),
])
def test_usage_error_exit_code(cli, argv):
    status, document, last = cli(*argv)
    assert status == 1
    assert document is None
    assert json.loads(last)['error']['code'] == 'UsageError'


def test_unreadable_input_files(cli, tmp_path):
    status, document, last = cli('asym', 'classify', '--side', 'left', '--s', '1/3', '--v', '0,0,2,-3',
                                 '--candidates', str(tmp_path / 'missing' / 'c.txt'))
    assert status == 1
    assert document is None
    assert json.loads(last)['error']['code'] == 'InputFileError'

    out = str(tmp_path / 'figure.csv')
    status, _, last = cli('plot', '--spec', str(tmp_path / 'missing.yaml'), '--out', out)
    assert status == 1
    assert json.loads(last)['error']['code'] == 'InputFileError'

    no_window = tmp_path / 'no_window.yaml'
    no_window.write_text(yaml.safe_dump({'beta_max': '1', 'curves': [{'id': 'theta_O', 'kind': 'theta',
                                                                      'w': '1,0,0,0'}]}))
    status, _, last = cli('plot', '--spec', str(no_window), '--out', out)
    assert status == 1
    error = json.loads(last)['error']
    assert error['code'] == 'InputFileError'
    assert 'beta_min' in error['message']

    broken = tmp_path / 'broken.yaml'
    broken.write_text("curves: [unclosed\n")
    status, _, last = cli('plot', '--spec', str(broken), '--out', out)
    assert status == 1
    assert json.loads(last)['error']['code'] == 'InputFileError'
    assert not os.path.exists(out)


def test_run_rejects_unknown_flags():
    with pytest.raises(StabilityError) as excinfo:
        run(CommandRequest(('slope', 'mu'), {'ch': '1,0,0,0', 'beta': '0'}))
    assert excinfo.value.code == 'UsageError'
    with pytest.raises(StabilityError) as excinfo:
        run(CommandRequest(('slope', 'median'), {}))
    assert excinfo.value.code == 'UsageError'


def test_rationals_round_trip():
    document = run(CommandRequest(('wall', 'bridgeland'),
                                  {'v': '1,0,0,0', 'w': '2,3,5/2,3/2', 's': '1/3'}))
    assert document['coefficients']['A'] == '-3/4'
    for value in document['coefficients'].values():
        assert str(parse_rational(value)) == value
