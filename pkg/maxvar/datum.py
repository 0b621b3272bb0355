"""
Seeded initial data on line, torus and zonal-sphere grids, plus CSV import.
"""

import math
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from maxvar.evolution import Domain, GridFunction, LineDomain, TorusDomain, ZonalSphereDomain

GENERATORS = ('piecewise_linear', 'step', 'gaussian_bump', 'single_mode', 'custom_csv')


class DatumError(ValueError):
    """Malformed datum file"""


@dataclass(frozen=True)
class DatumSpec:
    generator: str
    domain: Domain
    seed: int = 0
    segments: int = 8
    jumps: int = 4
    center: float = 0.0
    width: float = 0.5
    path: Optional[str] = None

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ValueError(f"unknown datum generator {self.generator!r}; expected one of {GENERATORS}")
        if self.generator == 'piecewise_linear' and self.segments < 2:
            raise ValueError(f"piecewise_linear needs at least 2 segments, got {self.segments}")
        if self.generator == 'step' and self.jumps < 2:
            raise ValueError(f"step needs at least 2 jumps, got {self.jumps}")
        if self.generator == 'gaussian_bump' and not self.width > 0:
            raise ValueError(f"gaussian_bump width must be positive, got {self.width}")
        if self.generator == 'custom_csv' and not self.path:
            raise ValueError("custom_csv needs a path")

    def with_domain(self, domain: Domain) -> 'DatumSpec':
        return DatumSpec(self.generator, domain, self.seed, self.segments, self.jumps,
                         self.center, self.width, self.path)


def _rng(spec: DatumSpec) -> np.random.Generator:
    return np.random.default_rng(spec.seed)


KNOT_LATTICE = 32


def _lattice(domain: Domain) -> Tuple[float, float]:
    """(origin, cell) of the knot lattice: 32 equal cells across the domain"""
    if isinstance(domain, LineDomain):
        return domain.x_min, domain.length / KNOT_LATTICE
    if isinstance(domain, TorusDomain):
        return 0.0, 1.0 / KNOT_LATTICE
    return 0.0, math.pi / KNOT_LATTICE


def _knot_positions(domain: Domain, count: int, rng: np.random.Generator) -> np.ndarray:
    """
    count distinct knots on a fixed lattice, so refined grids reproduce the same function.
    Line and sphere knots include both ends.
    """
    origin, cell = _lattice(domain)
    if isinstance(domain, TorusDomain):
        if count > KNOT_LATTICE:
            raise ValueError(f"at most {KNOT_LATTICE} torus knots, got {count}")
        k = np.sort(rng.choice(KNOT_LATTICE, size=count, replace=False))
    else:
        if count - 1 > KNOT_LATTICE - 1:
            raise ValueError(f"at most {KNOT_LATTICE} segments, got {count}")
        inner = np.sort(rng.choice(np.arange(1, KNOT_LATTICE), size=count - 1, replace=False))
        k = np.concatenate([[0], inner, [KNOT_LATTICE]])
    return origin + k * cell


def piecewise_linear_knots(spec: DatumSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    Knots (x_k, y_k) of a piecewise_linear datum. Line data vanish at both ends, so the
    zero extension stays continuous; torus data are periodic through the first knot.
    """
    if spec.generator != 'piecewise_linear':
        raise ValueError("knots exist only for the piecewise_linear generator")
    rng = _rng(spec)
    kx = _knot_positions(spec.domain, spec.segments, rng)
    ky = rng.uniform(0.0, 1.0, size=kx.size)
    if isinstance(spec.domain, LineDomain):
        ky[0] = ky[-1] = 0.0
    return kx, ky


def segment_slopes(spec: DatumSpec) -> np.ndarray:
    kx, ky = piecewise_linear_knots(spec)
    if isinstance(spec.domain, TorusDomain):
        kx = np.append(kx, kx[0] + 1.0)
        ky = np.append(ky, ky[0])
    return np.diff(ky) / np.diff(kx)


def _step_values(spec: DatumSpec) -> np.ndarray:
    """Piecewise-constant data with jumps at seeded continuous positions"""
    rng = _rng(spec)
    domain = spec.domain
    nodes = domain.nodes
    if isinstance(domain, TorusDomain):
        cuts = np.sort(rng.uniform(0.0, 1.0, size=spec.jumps))
        levels = rng.uniform(0.1, 1.0, size=spec.jumps)
        # level k holds on [cut_k, cut_{k+1}); before the first cut the last level wraps around
        which = np.searchsorted(cuts, nodes, side='right') - 1
        return levels[which % spec.jumps]
    lo, hi = nodes[0], nodes[-1]
    margin = 0.05 * (hi - lo)
    cuts = np.sort(rng.uniform(lo + margin, hi - margin, size=spec.jumps))
    levels = rng.uniform(0.1, 1.0, size=spec.jumps + 1)
    if isinstance(domain, LineDomain):
        levels[0] = levels[-1] = 0.0
    return levels[np.searchsorted(cuts, nodes, side='right')]


def _bump_values(spec: DatumSpec) -> np.ndarray:
    nodes = spec.domain.nodes
    distance = nodes - spec.center
    if isinstance(spec.domain, TorusDomain):
        distance = distance - np.round(distance)
    return np.exp(-distance ** 2 / (2.0 * spec.width ** 2))


def _single_mode_values(spec: DatumSpec) -> np.ndarray:
    domain = spec.domain
    if isinstance(domain, TorusDomain):
        return 1.0 + np.cos(2.0 * math.pi * domain.nodes)
    if isinstance(domain, ZonalSphereDomain):
        return 1.0 + domain.cosines
    raise ValueError("single_mode is defined on the torus and the zonal sphere")


def generate_datum(spec: DatumSpec, domain: Optional[Domain] = None) -> GridFunction:
    if domain is not None:
        spec = spec.with_domain(domain)
    if spec.generator == 'piecewise_linear':
        kx, ky = piecewise_linear_knots(spec)
        period = 1.0 if isinstance(spec.domain, TorusDomain) else None
        values = np.interp(spec.domain.nodes, kx, ky, period=period)
    elif spec.generator == 'step':
        values = _step_values(spec)
    elif spec.generator == 'gaussian_bump':
        values = _bump_values(spec)
    elif spec.generator == 'single_mode':
        values = _single_mode_values(spec)
    else:
        return datum_from_frame(read_datum_csv(spec.path), spec.domain)
    return GridFunction(spec.domain, values)


# ---------------- CSV ----------------
def read_datum_csv(path: str) -> pd.DataFrame:
    """Read an `x,value` table; rows must be numeric with strictly increasing x"""
    try:
        frame = pd.read_csv(path, dtype=str, skipinitialspace=True)
    except FileNotFoundError:
        raise
    except Exception as e:
        raise DatumError(f"{path}: cannot parse CSV ({e})") from e
    columns = [c.strip() for c in frame.columns]
    if columns != ['x', 'value']:
        raise DatumError(f"{path}: header must be 'x,value', got {','.join(columns)!r}")
    frame.columns = columns
    numeric = frame.apply(pd.to_numeric, errors='coerce')
    for i, row in enumerate(numeric.itertuples(index=False), start=1):
        if not (np.isfinite(row.x) and np.isfinite(row.value)):
            raw = frame.iloc[i - 1]
            raise DatumError(f"{path}: row {i} is not a pair of finite numbers: {raw['x']!r},{raw['value']!r}")
    if len(numeric) < 3:
        raise DatumError(f"{path}: need at least 3 rows, got {len(numeric)}")
    steps = np.diff(numeric['x'].to_numpy())
    bad = np.flatnonzero(steps <= 0)
    if bad.size:
        raise DatumError(f"{path}: row {bad[0] + 2} does not increase x")
    logging.info(f"Loaded datum {path}: {len(numeric)} rows")
    return numeric.astype(float)


def datum_from_frame(frame: pd.DataFrame, domain: Domain) -> GridFunction:
    """
    Line: x must be uniform and defines the grid. Torus: x must be j/n. Sphere: x is the
    colatitude and is interpolated onto the Gauss-Legendre nodes of the given domain.
    """
    x = frame['x'].to_numpy(dtype=float)
    v = frame['value'].to_numpy(dtype=float)
    n = x.size
    if isinstance(domain, ZonalSphereDomain):
        if x[0] < 0 or x[-1] > math.pi:
            raise DatumError("sphere data need colatitudes in [0, pi]")
        return GridFunction(domain, np.interp(domain.nodes, x, v))
    spacing = np.diff(x)
    h = (x[-1] - x[0]) / (n - 1)
    off = np.flatnonzero(np.abs(spacing - h) > 1e-6 * h)
    if off.size:
        raise DatumError(f"row {off[0] + 2}: x is not on a uniform grid (spacing {spacing[off[0]]:g}, expected {h:g})")
    if isinstance(domain, TorusDomain):
        expected = np.arange(n) / n
        if abs(x[0]) > 1e-9 or np.max(np.abs(x - expected)) > 1e-6 / n:
            raise DatumError("torus data need x_j = j/n on [0, 1)")
        return GridFunction(TorusDomain(n), v)
    return GridFunction(LineDomain(float(x[0]), float(x[-1]), n), v)
