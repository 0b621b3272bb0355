import pytest

from maxvar.config import DEFAULTS, merge
from maxvar.evolution import LineDomain, TorusDomain, ZonalSphereDomain


@pytest.fixture
def line():
    return LineDomain(-4.0, 4.0, 161)


@pytest.fixture
def torus():
    return TorusDomain(128)


@pytest.fixture
def sphere():
    return ZonalSphereDomain(32)


@pytest.fixture
def small_config(tmp_path):
    """Defaults shrunk to grids and counts a test run can afford"""
    return merge(DEFAULTS, {
        'logging': {'level': 'INFO', 'file': str(tmp_path / 'maxvar.log')},
        'grids': {
            'line': {'x_min': -4.0, 'x_max': 4.0, 'n': 161},
            'torus': {'n': 64},
            'sphere': {'n': 24, 'azimuth_nodes': 64},
        },
        'maximal': {'n_t': 60},
        'verify': {'seed': 7, 'n_data': 2, 'n_envelope_pairs': 3, 'envelope_iterations': 60,
                   'report': str(tmp_path / 'reports' / 'verify_report.json')},
    })
