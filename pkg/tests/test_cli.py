import json

import pandas as pd
import pytest
import yaml

from maxvar.cli import build_parser, main


@pytest.fixture
def config_file(tmp_path, monkeypatch):
    """Small grids; the log file and reports land in tmp_path"""
    monkeypatch.chdir(tmp_path)
    path = tmp_path / "maxvar.yaml"
    path.write_text(yaml.safe_dump({
        'logging': {'level': 'INFO', 'file': str(tmp_path / 'maxvar.log')},
        'grids': {'line': {'x_min': -4.0, 'x_max': 4.0, 'n': 161}, 'torus': {'n': 64},
                  'sphere': {'n': 24, 'azimuth_nodes': 64, 'rho_max': 0.85}},
        'maximal': {'n_t': 40},
        'verify': {'n_data': 2, 'n_envelope_pairs': 2, 'envelope_iterations': 40,
                   'report': str(tmp_path / 'reports' / 'verify_report.json')},
    }))
    monkeypatch.setenv("MAXVAR_CONFIG_PATH", str(path))
    return path


def test_kernel_table(config_file, tmp_path):
    out = tmp_path / "kernel.csv"
    assert main(['kernel', '--family', 'elliptic', '--a', '1', '--b', '0', '--t', '1', '--points', '11',
                 '--out', str(out)]) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ['x', 'phi']
    assert frame['phi'].iloc[0] == pytest.approx(1.0 / 3.141592653589793, rel=1e-12)


def test_multiplier_table(config_file, tmp_path):
    out = tmp_path / "multiplier.csv"
    assert main(['kernel', '--multiplier', '--N', '5', '--out', str(out)]) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ['n', 'multiplier']
    assert frame['multiplier'].iloc[0] == 1.0
    assert len(frame) == 6


def test_spherical_kernel_table(config_file, tmp_path):
    out = tmp_path / "sphere.csv"
    assert main(['kernel', '--family', 'spherical-heat', '--t', '0.5', '--points', '5', '--out', str(out)]) == 0
    assert list(pd.read_csv(out).columns) == ['theta', 'kernel']


def test_invalid_parameters_exit_2(config_file):
    assert main(['kernel', '--a', '0', '--b', '0']) == 2


def test_truncation_too_small_exits_2(config_file):
    assert main(['kernel', '--family', 'spherical-heat', '--t', '0.01', '--N', '3']) == 2


def test_missing_config_exits_1(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("MAXVAR_CONFIG_PATH", raising=False)
    assert main(['kernel', '--config', str(tmp_path / 'absent.yaml')]) == 1


def test_evolve_table(config_file, tmp_path):
    out = tmp_path / "evolve.csv"
    assert main(['evolve', '--domain', 'torus', '--generator', 'single_mode', '--t', '0.1',
                 '--out', str(out)]) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ['x', 'u0', 'u']
    assert len(frame) == 64


def test_maximal_table(config_file, tmp_path):
    out = tmp_path / "maximal.csv"
    assert main(['maximal', '--domain', 'line', '--generator', 'gaussian_bump', '--family', 'elliptic',
                 '--a', '1', '--b', '0', '--out', str(out)]) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ['x', 'u0', 'u_star', 'arg_sup', 'detached', 'component', 'component_convex']
    assert len(frame) == 161
    assert (frame['u_star'] >= frame['u0']).all()
    assert frame['detached'].iloc[0]


def test_maximal_from_csv(config_file, tmp_path):
    datum = tmp_path / "datum.csv"
    datum.write_text("x,value\n" + "\n".join(f"{x / 10},{max(0.0, 1 - abs(x) / 10)}" for x in range(-20, 21)))
    out = tmp_path / "maximal.csv"
    assert main(['maximal', '--csv', str(datum), '--family', 'nontangential', '--alpha', '1',
                 '--out', str(out)]) == 0
    assert len(pd.read_csv(out)) == 41


def test_bad_csv_exits_2(config_file, tmp_path):
    datum = tmp_path / "datum.csv"
    datum.write_text("x,value\n0,1\n1,oops\n2,1\n")
    assert main(['maximal', '--csv', str(datum)]) == 2


def test_counterexample_report(config_file, tmp_path):
    out = tmp_path / "report.json"
    assert main(['counterexample', '--d', '2', '--alpha', '2', '--out', str(out)]) == 0
    report = json.loads(out.read_text())
    assert report['summary'] == {'total': 4, 'passed': 4, 'failed': 0}
    golden = [o for o in report['outcomes'] if o['name'].startswith('counterexample_golden')]
    assert golden[0]['metadata']['value'] == pytest.approx(0.0828, abs=1e-4)


def test_counterexample_needs_both_flags(config_file):
    assert main(['counterexample', '--d', '2']) == 2


def test_empty_annulus_exits_2(config_file):
    assert main(['counterexample', '--d', '2', '--alpha', '1']) == 2


def test_verify_report_is_deterministic(config_file, tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert main(['verify', '--suite', 'lemma7', '--seed', '5', '--out', str(first)]) == 0
    assert main(['verify', '--suite', 'lemma7', '--seed', '5', '--out', str(second)]) == 0
    a, b = json.loads(first.read_text()), json.loads(second.read_text())
    a.pop('timestamp')
    b.pop('timestamp')
    assert a == b
    assert a['config']['verify']['seed'] == 5


def test_unknown_suite_is_a_usage_error(config_file):
    with pytest.raises(SystemExit) as info:
        main(['verify', '--suite', 'nope'])
    assert info.value.code == 2


def test_parser_defaults():
    args = build_parser().parse_args(['maximal'])
    assert (args.domain, args.generator, args.family) == ('line', 'piecewise_linear', 'elliptic')
