"""
maxvar command line.

    python -m maxvar kernel --family elliptic --a 1 --b 0 --t 1
    python -m maxvar evolve --domain torus --generator single_mode --t 0.1
    python -m maxvar maximal --domain line --generator step --family nontangential --alpha 1
    python -m maxvar verify --suite lemma7 --seed 7
    python -m maxvar counterexample --d 2 --alpha 2
"""

import sys
import json
import uuid
import logging
import argparse
import platform
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
import psutil

from maxvar import __version__
from maxvar.config import load_config, merge
from maxvar.datum import GENERATORS, DatumSpec, generate_datum
from maxvar.evolution import (LineDomain, TimeGrid, TorusDomain, ZonalSphereDomain, evolve_line,
                              evolve_torus, evolve_zonal_sphere)
from maxvar.kernels import (Elliptic, EllipticParams, KernelSpec, NonTangentialPoisson, SphericalHeat,
                            SphericalPoisson, elliptic_kernel_values, elliptic_multiplier, fourier_cutoff,
                            spherical_heat, spherical_poisson)
from maxvar.maximal import default_time_grid, maximal_centered
from maxvar.verify import SUITES, CheckOutcome, CheckSettings, convexity_violation, run_suite

FAMILIES = ('elliptic', 'spherical-poisson', 'spherical-heat', 'nontangential')


# ---------------- logging / run bookkeeping ----------------
def setup_logging(config: Dict, level: Optional[str] = None):
    log_conf = config['logging']
    logging.basicConfig(
        level=getattr(logging, (level or log_conf['level']).upper(), logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(log_conf['file']),
            logging.StreamHandler()
        ],
        force=True
    )


def new_run_id() -> str:
    return f"run_{datetime.now().strftime('%Y%m%d_%H%M%S')}_{uuid.uuid4().hex[:8]}"


def host_snapshot() -> Dict[str, Any]:
    return {
        'platform': platform.platform(),
        'python_version': platform.python_version(),
        'cpu_percent': psutil.cpu_percent(interval=None),
        'memory_percent': psutil.virtual_memory().percent,
    }


def _ensure_parent(path: str):
    parent = Path(path).parent
    if str(parent):
        parent.mkdir(parents=True, exist_ok=True)


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"cannot serialize {type(value).__name__}")


def write_table(frame: pd.DataFrame, path: str):
    _ensure_parent(path)
    frame.to_csv(path, index=False)
    logging.info(f"Wrote {path} ({len(frame)} rows)")


def write_report(path: str, config: Dict, outcomes: List[CheckOutcome]) -> Dict:
    """JSON report; everything except the timestamp is a function of config and seed"""
    passed = sum(o.passed for o in outcomes)
    report = {
        'config': {k: v for k, v in config.items() if k != 'logging'},
        'outcomes': [o.to_record() for o in outcomes],
        'summary': {'total': len(outcomes), 'passed': passed, 'failed': len(outcomes) - passed},
        'timestamp': datetime.now().isoformat(timespec='seconds'),
    }
    _ensure_parent(path)
    with open(path, 'w') as f:
        json.dump(report, f, indent=2, sort_keys=True, default=_json_default)
    logging.info(f"Report written to {path}")
    return report


# ---------------- argument → object builders ----------------
def build_domain(args, config: Dict):
    grids = config['grids']
    if args.domain == 'line':
        line = grids['line']
        return LineDomain(float(args.x_min if args.x_min is not None else line['x_min']),
                          float(args.x_max if args.x_max is not None else line['x_max']),
                          int(args.n or line['n']))
    if args.domain == 'torus':
        return TorusDomain(int(args.n or grids['torus']['n']))
    return ZonalSphereDomain(int(args.n or grids['sphere']['n']))


def build_datum(args, config: Dict) -> DatumSpec:
    generator = 'custom_csv' if args.csv else args.generator
    return DatumSpec(generator, build_domain(args, config), seed=args.seed, segments=args.segments,
                     jumps=args.jumps, center=args.center, width=args.width, path=args.csv)


def build_kernel_spec(args, config: Dict) -> KernelSpec:
    if args.family == 'elliptic':
        return Elliptic(EllipticParams(args.a, args.b, args.d or 1))
    if args.family == 'spherical-poisson':
        return SphericalPoisson(args.d or 2)
    if args.family == 'spherical-heat':
        return SphericalHeat(args.d or 2, args.N, float(config['kernels']['heat_tail_tol']))
    return NonTangentialPoisson(args.alpha)


def build_time_grid(args, domain, spec: KernelSpec, config: Dict) -> TimeGrid:
    n_t = int(args.n_t or config['maximal']['n_t'])
    rho_max = float(config['grids']['sphere']['rho_max'])
    tg = default_time_grid(domain, spec, n_t, rho_max)
    if args.t_min is None and args.t_max is None:
        return tg
    t_min = tg.t_min if args.t_min is None else args.t_min
    t_max = tg.t_max if args.t_max is None else args.t_max
    return TimeGrid(t_min, t_max, n_t, tg.scale)


def _config_with_overrides(args) -> Dict:
    config = load_config(args.config)
    override: Dict[str, Any] = {}
    if getattr(args, 'seed', None) is not None and args.command in ('verify', 'counterexample'):
        override.setdefault('verify', {})['seed'] = args.seed
    if getattr(args, 'n_data', None) is not None:
        override.setdefault('verify', {})['n_data'] = args.n_data
    if getattr(args, 'n_pairs', None) is not None:
        override.setdefault('verify', {})['n_envelope_pairs'] = args.n_pairs
    if getattr(args, 'd', None) is not None or getattr(args, 'alpha', None) is not None:
        if args.command in ('verify', 'counterexample'):
            if args.d is None or args.alpha is None:
                raise ValueError("--d and --alpha go together")
            override['counterexample'] = {'cases': [[args.d, args.alpha]]}
    return merge(config, override)


# ---------------- commands ----------------
def cmd_kernel(args, config: Dict) -> int:
    t = args.t
    if args.family == 'elliptic':
        params = EllipticParams(args.a, args.b, args.d or 1)
        if not t > 0:
            raise ValueError(f"t must be positive, got {t}")
        if args.multiplier:
            n = np.arange(0, (args.N or fourier_cutoff(params, t)) + 1)
            frame = pd.DataFrame({'n': n, 'multiplier': elliptic_multiplier(params, t, n.astype(float))})
        else:
            x = np.linspace(0.0, args.x_extent, args.points)
            frame = pd.DataFrame({'x': x, 'phi': elliptic_kernel_values(params, t, x)})
    elif args.family == 'spherical-poisson':
        theta = np.linspace(0.0, np.pi, args.points)
        frame = pd.DataFrame({'theta': theta, 'kernel': spherical_poisson(np.cos(theta), args.rho, args.d or 2)})
    elif args.family == 'spherical-heat':
        theta = np.linspace(0.0, np.pi, args.points)
        values = spherical_heat(np.cos(theta), t, args.d or 2, args.N, float(config['kernels']['heat_tail_tol']))
        frame = pd.DataFrame({'theta': theta, 'kernel': values})
    else:
        raise ValueError("kernel tables cover the elliptic and spherical families")
    write_table(frame, args.out or 'kernel.csv')
    return 0


def cmd_evolve(args, config: Dict) -> int:
    datum = build_datum(args, config)
    spec = build_kernel_spec(args, config)
    u0 = generate_datum(datum)
    schoenberg_step = float(config['kernels']['schoenberg_step'])
    if isinstance(spec, Elliptic):
        if isinstance(u0.domain, LineDomain):
            u = evolve_line(u0, spec.params, args.t, schoenberg_step)
        elif isinstance(u0.domain, TorusDomain):
            u = evolve_torus(u0, spec.params, args.t, args.interpolant)
        else:
            raise ValueError("the elliptic family evolves on line and torus grids")
    elif isinstance(spec, (SphericalPoisson, SphericalHeat)):
        param = args.rho if isinstance(spec, SphericalPoisson) else args.t
        u = evolve_zonal_sphere(u0, spec, param, int(config['grids']['sphere']['azimuth_nodes']))
    else:
        raise ValueError("evolve covers the elliptic and spherical families; use maximal for the cone operator")
    frame = pd.DataFrame({'x': u0.nodes, 'u0': u0.values, 'u': u.values})
    write_table(frame, args.out or 'evolve.csv')
    return 0


def _component_columns(res, tol: float) -> Tuple[np.ndarray, List[Optional[bool]]]:
    component = np.full(res.u0.n, -1, dtype=int)
    convex: List[Optional[bool]] = [None] * res.u0.n
    if isinstance(res.domain, ZonalSphereDomain):
        for k, c in enumerate(res.components):
            component[res.component_indices(c)] = k
        return component, convex
    _, summary = convexity_violation(res)
    scale = max(float(np.max(res.u_star.values)), 1e-300)
    for k, (c, item) in enumerate(zip(res.components, summary)):
        low = item['min_second_difference']
        flag = True if low is None else bool(low >= -tol * scale)
        for i in res.component_indices(c):
            component[i] = k
            convex[i] = flag
    return component, convex


def cmd_maximal(args, config: Dict) -> int:
    datum = build_datum(args, config)
    spec = build_kernel_spec(args, config)
    u0 = generate_datum(datum)
    tg = build_time_grid(args, u0.domain, spec, config)
    settings = CheckSettings.from_config(config)
    res = maximal_centered(u0, spec, tg, settings.detach_tol, settings.refine, settings.iterations,
                           settings.schoenberg_step, settings.azimuth_nodes, settings.y_res)
    component, convex = _component_columns(res, float(config['verify']['convexity_tol']))
    frame = pd.DataFrame({
        'x': u0.nodes,
        'u0': res.u0.values,
        'u_star': res.u_star.values,
        'arg_sup': res.arg_sup,
        'detached': res.detachment_mask,
        'component': component,
        'component_convex': convex,
    })
    logging.info(f"maximal: {int(res.detachment_mask.sum())} detached points in {len(res.components)} components")
    write_table(frame, args.out or 'maximal.csv')
    return 0


def cmd_verify(args, config: Dict) -> int:
    suite = getattr(args, 'suite', 'counterexample')
    run_id = new_run_id()
    start = datetime.now()
    logging.info(f"Started verification run: {run_id} (suite={suite}, maxvar {__version__})")
    logging.info(f"Host: {host_snapshot()}")
    outcomes = run_suite(suite, config)
    report = write_report(args.out or config['verify']['report'], config, outcomes)
    summary = report['summary']
    duration = (datetime.now() - start).total_seconds()
    status = 'SUCCESS' if summary['failed'] == 0 else 'FAILED'
    logging.info(f"Ended verification run: {run_id} with status: {status} "
                 f"({summary['passed']}/{summary['total']} passed, {duration:.1f}s)")
    return 0 if summary['failed'] == 0 else 1


COMMANDS = {
    'kernel': cmd_kernel,
    'evolve': cmd_evolve,
    'maximal': cmd_maximal,
    'verify': cmd_verify,
    'counterexample': cmd_verify,
}


# ---------------- parser ----------------
def _add_common(p: argparse.ArgumentParser):
    p.add_argument('--config', help='Path to maxvar.yaml (default: MAXVAR_CONFIG_PATH or config/maxvar.yaml)')
    p.add_argument('--log-level', help='Override logging.level from the config')
    p.add_argument('--out', help='Output file (CSV for tables, JSON for reports)')


def _add_family(p: argparse.ArgumentParser, default: str = 'elliptic'):
    p.add_argument('--family', choices=FAMILIES, default=default)
    p.add_argument('--a', type=float, default=1.0)
    p.add_argument('--b', type=float, default=1.0)
    p.add_argument('--d', type=int, help='Dimension (default 1 for elliptic, 2 for spherical)')
    p.add_argument('--N', type=int, help='Spherical heat truncation degree / multiplier table length')
    p.add_argument('--alpha', type=float, default=0.0, help='Cone aperture of the nontangential operator')


def _add_datum(p: argparse.ArgumentParser):
    p.add_argument('--domain', choices=('line', 'torus', 'sphere'), default='line')
    p.add_argument('--generator', choices=[g for g in GENERATORS if g != 'custom_csv'], default='piecewise_linear')
    p.add_argument('--csv', help='Datum CSV with header x,value (overrides --generator)')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--segments', type=int, default=8)
    p.add_argument('--jumps', type=int, default=4)
    p.add_argument('--center', type=float, default=0.0)
    p.add_argument('--width', type=float, default=0.5)
    p.add_argument('--n', type=int, help='Grid size (default from config)')
    p.add_argument('--x-min', type=float)
    p.add_argument('--x-max', type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='maxvar', description='Maximal functions of elliptic evolutions')
    parser.add_argument('--version', action='version', version=f"maxvar {__version__}")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('kernel', help='Tabulate a kernel or its multiplier')
    _add_common(p)
    _add_family(p)
    p.add_argument('--t', type=float, default=1.0)
    p.add_argument('--rho', type=float, default=0.5)
    p.add_argument('--points', type=int, default=201)
    p.add_argument('--x-extent', type=float, default=5.0, help='Tabulate |x| in [0, x-extent]')
    p.add_argument('--multiplier', action='store_true', help='Write (n, multiplier) instead of (x, phi)')

    p = sub.add_parser('evolve', help='Evolve a datum to one time')
    _add_common(p)
    _add_family(p)
    _add_datum(p)
    p.add_argument('--t', type=float, default=1.0)
    p.add_argument('--rho', type=float, default=0.5)
    p.add_argument('--interpolant', choices=('trigonometric', 'linear'), default='trigonometric')

    p = sub.add_parser('maximal', help='Compute u* and its detachment set')
    _add_common(p)
    _add_family(p)
    _add_datum(p)
    p.add_argument('--n-t', type=int)
    p.add_argument('--t-min', type=float)
    p.add_argument('--t-max', type=float)

    p = sub.add_parser('verify', help='Run a verification suite and write a JSON report')
    _add_common(p)
    p.add_argument('--suite', choices=SUITES + ('all',), default='all')
    p.add_argument('--seed', type=int)
    p.add_argument('--n-data', type=int, help='Seeded data per setting')
    p.add_argument('--n-pairs', type=int, help='Seeded envelope pairs')
    p.add_argument('--d', type=int, help='Counterexample dimension')
    p.add_argument('--alpha', type=float, help='Counterexample aperture')

    p = sub.add_parser('counterexample', help='Alias for verify --suite counterexample')
    _add_common(p)
    p.add_argument('--d', type=int)
    p.add_argument('--alpha', type=float)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == 'counterexample':
        args.suite = 'counterexample'
    try:
        config = _config_with_overrides(args)
    except FileNotFoundError as e:
        print(f"maxvar: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"maxvar: {e}", file=sys.stderr)
        return 2
    setup_logging(config, args.log_level)
    try:
        return COMMANDS[args.command](args, config)
    except ValueError as e:
        logging.error(f"{args.command}: {e}")
        print(f"maxvar {args.command}: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        logging.error(f"{args.command} failed: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
