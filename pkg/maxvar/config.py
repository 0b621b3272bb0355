import os
import copy
import logging
from typing import Dict, Optional

import yaml

DEFAULTS: Dict = {
    'logging': {'level': 'INFO', 'file': 'maxvar.log'},
    'quadrature': {
        'abs_tol': 1e-10,
        'rel_tol': 1e-8,
        'max_subdivisions': 2000,
        'truncation_radius': 50.0,
    },
    'kernels': {
        'schoenberg_step': 0.1,
        'heat_tail_tol': 1e-10,
        'heat_min_truncation': 8,
        'lattice_cutoff': 1e-14,
        'lattice_max_shells': 4000,
    },
    'grids': {
        'line': {'x_min': -4.0, 'x_max': 4.0, 'n': 321},
        'torus': {'n': 256},
        'sphere': {'n': 64, 'azimuth_nodes': 128, 'rho_max': 0.98},
    },
    'maximal': {
        'n_t': 200,
        'detach_tol': 1e-9,
        'y_res': 16,
        'refine': True,
        'refine_iterations': 48,
    },
    'verify': {
        'seed': 42,
        'n_data': 100,
        'n_envelope_pairs': 50,
        'envelope_iterations': 200,
        'inequality_tol': 1e-3,
        'convexity_tol': 1e-6,
        'envelope_tol': 1e-6,
        'counterexample_tol': 1e-4,
        'refinement_tol': 5e-4,
        'report': 'reports/verify_report.json',
    },
    'counterexample': {
        'cases': [[2, 2.0], [3, 1.0], [4, 1.0]],
        'margin': 0.05,
        'radial_points': 200,
    },
}


def resolve_config_path(path: Optional[str] = None) -> str:
    """Find the YAML config: explicit path, env var, then the repo config/ directory"""
    if path and not os.path.exists(path):
        raise FileNotFoundError(f"Config file not found: {path}")
    candidates = [
        path,
        os.environ.get("MAXVAR_CONFIG_PATH"),
        os.path.join(os.path.dirname(__file__), "../config/maxvar.yaml"),
        os.path.join(os.getcwd(), "config/maxvar.yaml"),
    ]
    for p in candidates:
        if p and os.path.exists(p):
            logging.debug(f"Config file found: {p}")
            return p
    tried = [p for p in candidates if p]
    raise FileNotFoundError(f"Could not find maxvar.yaml (tried {tried}). Set MAXVAR_CONFIG_PATH env var.")


def merge(base: Dict, override: Dict) -> Dict:
    """Recursively merge override into a copy of base"""
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def load_config(path: Optional[str] = None) -> Dict:
    """Load YAML config merged over the built-in defaults"""
    config_path = resolve_config_path(path)
    with open(config_path, 'r') as f:
        loaded = yaml.safe_load(f) or {}
    if not isinstance(loaded, dict):
        raise ValueError(f"Config file {config_path} must contain a mapping at top level")
    return merge(DEFAULTS, loaded)
