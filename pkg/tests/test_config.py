import pytest

from maxvar.config import DEFAULTS, load_config, merge, resolve_config_path


def test_merge_is_recursive_and_copies():
    merged = merge(DEFAULTS, {'grids': {'torus': {'n': 32}}, 'extra': 1})
    assert merged['grids']['torus']['n'] == 32
    assert merged['grids']['line'] == DEFAULTS['grids']['line']
    assert merged['extra'] == 1
    assert DEFAULTS['grids']['torus']['n'] == 256


def test_repo_config_loads():
    config = load_config()
    assert config['verify']['seed'] == 42
    assert config['counterexample']['cases'][0] == [2, 2.0]


def test_explicit_path_overrides(tmp_path):
    path = tmp_path / "custom.yaml"
    path.write_text("maximal:\n  n_t: 17\n")
    config = load_config(str(path))
    assert config['maximal']['n_t'] == 17
    assert config['maximal']['detach_tol'] == DEFAULTS['maximal']['detach_tol']


def test_env_var_is_used(tmp_path, monkeypatch):
    path = tmp_path / "env.yaml"
    path.write_text("verify:\n  seed: 3\n")
    monkeypatch.setenv("MAXVAR_CONFIG_PATH", str(path))
    assert resolve_config_path() == str(path)
    assert load_config()['verify']['seed'] == 3


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("")
    assert load_config(str(path)) == DEFAULTS


def test_top_level_must_be_a_mapping(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n")
    with pytest.raises(ValueError):
        load_config(str(path))


def test_missing_explicit_path(tmp_path):
    with pytest.raises(FileNotFoundError):
        resolve_config_path(str(tmp_path / "absent.yaml"))
