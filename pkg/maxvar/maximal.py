"""
Maximal functions u*(x) = sup_t u(x, t) over a time grid (or a cone), with
per-point golden-section refinement, and the detachment set {u* > u0}.
"""

import math
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from maxvar.evolution import (GridFunction, LineDomain, LinePropagator, SpherePropagator, TimeGrid,
                              TorusDomain, TorusPropagator, ZonalSphereDomain, cone_values)
from maxvar.kernels import (Elliptic, EllipticParams, KernelSpec, NonTangentialPoisson, SphericalHeat,
                            SphericalPoisson, validate_kernel_spec)
from maxvar.numerics import golden_section_max

REFINE_WINDOW = 1e-3
RHO_CELLS = 3.0

Propagator = Union[LinePropagator, TorusPropagator, SpherePropagator]


@dataclass(frozen=True, eq=False)
class MaximalResult:
    u0: GridFunction
    u_star: GridFunction
    arg_sup: np.ndarray
    detachment_mask: np.ndarray
    components: List[Tuple[int, int]]
    detach_tol: float

    @property
    def domain(self):
        return self.u0.domain

    def component_indices(self, component: Tuple[int, int]) -> np.ndarray:
        """Grid indices of a component in order; cyclic components wrap past n - 1"""
        start, end = component
        n = self.u0.n
        if end >= start:
            return np.arange(start, end + 1)
        return np.concatenate([np.arange(start, n), np.arange(0, end + 1)])


def _runs(mask: np.ndarray, cyclic: bool) -> List[Tuple[int, int]]:
    n = mask.size
    if not mask.any():
        return []
    if mask.all():
        return [(0, n - 1)]
    runs = []
    i = 0
    while i < n:
        if mask[i]:
            j = i
            while j + 1 < n and mask[j + 1]:
                j += 1
            runs.append((i, j))
            i = j + 1
        else:
            i += 1
    if cyclic and len(runs) > 1 and runs[0][0] == 0 and runs[-1][1] == n - 1:
        first = runs.pop(0)
        last = runs.pop()
        runs.append((last[0], first[1]))
    return runs


def detachment_components(res: MaximalResult) -> List[Tuple[int, int]]:
    """Maximal runs of the detachment mask; on the torus a run may wrap (start > end)"""
    return _runs(np.asarray(res.detachment_mask, dtype=bool), res.domain.period is not None)


def _assemble(u0: GridFunction, best: np.ndarray, best_param: np.ndarray, datum_param: float,
              detach_tol: float) -> MaximalResult:
    datum = u0.values
    use_datum = datum >= best
    u_star = np.where(use_datum, datum, best)
    arg_sup = np.where(use_datum, datum_param, best_param)
    mask = u_star - datum > detach_tol * (1.0 + np.abs(datum))
    components = _runs(mask, u0.domain.period is not None)
    return MaximalResult(u0, u0.with_values(u_star), arg_sup, mask, components, detach_tol)


SEARCH_MAPS = {
    'log': (np.log, np.exp),
    'linear': (lambda p: p, lambda s: s),
    'boundary': (lambda p: -np.log1p(-p), lambda s: -np.expm1(-s)),
}


def _bracket(nodes: np.ndarray, idx: np.ndarray, scale: str) -> Tuple[np.ndarray, np.ndarray]:
    forward, _ = SEARCH_MAPS[scale]
    lo = nodes[np.maximum(idx - 1, 0)]
    hi = nodes[np.minimum(idx + 1, nodes.size - 1)]
    return forward(lo), forward(hi)


def _refine(evaluate, nodes: np.ndarray, best_idx: np.ndarray, best: np.ndarray, best_param: np.ndarray,
            select: np.ndarray, scale: str, iterations: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Golden-section search between the grid neighbours of each selected point's best node,
    in log t, in rho, or in -log(1 - rho) depending on the grid scale.
    evaluate(params, index) returns u at the selected points; values only ever go up.
    """
    index = np.flatnonzero(select)
    if index.size == 0 or iterations <= 0:
        return best, best_param
    lo, hi = _bracket(nodes, best_idx[index], scale)
    p_lo, p_hi = nodes[0], nodes[-1]
    _, inverse = SEARCH_MAPS[scale]

    def to_param(s):
        return np.clip(inverse(s), p_lo, p_hi)

    arg, value = golden_section_max(lambda s: evaluate(to_param(s), index), lo, hi, iterations)
    best, best_param = best.copy(), best_param.copy()
    better = value > best[index]
    best[index[better]] = value[better]
    best_param[index[better]] = to_param(arg)[better]
    logging.debug(f"refinement raised {int(better.sum())} of {index.size} points")
    return best, best_param


def propagator_for(u0: GridFunction, spec: KernelSpec, tg: TimeGrid, schoenberg_step: float,
                   azimuth_nodes: int) -> Propagator:
    domain = u0.domain
    if isinstance(spec, Elliptic):
        if tg.scale != 'log':
            raise ValueError("the elliptic family needs a log-spaced time grid")
        if isinstance(domain, LineDomain):
            return LinePropagator(u0, spec.params, (tg.t_min, tg.t_max), schoenberg_step)
        if isinstance(domain, TorusDomain):
            return TorusPropagator(u0, spec.params)
        raise ValueError("the elliptic family runs on line and torus grids")
    if isinstance(spec, (SphericalPoisson, SphericalHeat)):
        if not isinstance(domain, ZonalSphereDomain):
            raise ValueError(f"{spec.name} needs a zonal sphere grid")
        if isinstance(spec, SphericalPoisson) and tg.scale not in ('linear', 'boundary'):
            raise ValueError("the spherical Poisson family needs a rho-grid")
        if isinstance(spec, SphericalHeat) and tg.scale != 'log':
            raise ValueError("the spherical heat family needs a log-spaced time grid")
        return SpherePropagator(u0, spec, (tg.t_min, tg.t_max) if isinstance(spec, SphericalHeat) else None,
                                azimuth_nodes)
    raise ValueError(f"no centred maximal function for {spec.name}")


def datum_parameter(spec: KernelSpec) -> float:
    """arg_sup value of the datum candidate: t -> 0 for time families, rho -> 1 for the Poisson ball"""
    return 1.0 if isinstance(spec, SphericalPoisson) else 0.0


def maximal_centered(u0: GridFunction, spec: KernelSpec, tg: TimeGrid, detach_tol: float = 1e-9,
                     refine: bool = True, iterations: int = 48, schoenberg_step: float = 0.1,
                     azimuth_nodes: int = 128, y_res: int = 16) -> MaximalResult:
    """u*(x) = max(u0(x), sup over the grid of u(x, t)), refined between grid nodes"""
    if not detach_tol > 0:
        raise ValueError(f"detach_tol must be positive, got {detach_tol}")
    spec = validate_kernel_spec(spec)
    if isinstance(spec, NonTangentialPoisson):
        return maximal_nontangential(u0, spec.aperture, tg, y_res, detach_tol, refine, iterations)
    datum = u0.abs()
    propagator = propagator_for(datum, spec, tg, schoenberg_step, azimuth_nodes)
    nodes = tg.nodes
    values = propagator.evolve_many(nodes)
    best_idx = np.argmax(values, axis=0)
    best = values[best_idx, np.arange(datum.n)]
    best_param = nodes[best_idx]
    if refine:
        select = best > datum.values - REFINE_WINDOW * (1.0 + datum.values)
        best, best_param = _refine(propagator.evaluate, nodes, best_idx, best, best_param, select,
                                   tg.scale, iterations)
    result = _assemble(datum, best, best_param, datum_parameter(spec), detach_tol)
    logging.debug(f"maximal_centered {spec.name} on {datum.domain.kind}: "
                  f"{int(result.detachment_mask.sum())} detached points, {len(result.components)} components")
    return result


def maximal_nontangential(u0: GridFunction, alpha: float, tg: TimeGrid, y_res: int = 16,
                          detach_tol: float = 1e-9, refine: bool = True, iterations: int = 48) -> MaximalResult:
    """u*(x) = sup over the cone |y - x| <= alpha t of the harmonic extension, joined with u0(x)"""
    if alpha < 0:
        raise ValueError(f"aperture must be >= 0, got {alpha}")
    if y_res < 1:
        raise ValueError(f"y_res must be >= 1, got {y_res}")
    if not detach_tol > 0:
        raise ValueError(f"detach_tol must be positive, got {detach_tol}")
    if not isinstance(u0.domain, LineDomain):
        raise ValueError("the cone maximal function is defined on line grids")
    poisson = Elliptic(EllipticParams(1.0, 0.0, 1))
    if alpha == 0:
        return maximal_centered(u0, poisson, tg, detach_tol, refine, iterations)
    datum = u0.abs()
    nodes = tg.nodes
    n = datum.n
    cone = cone_values(datum, nodes, alpha, y_res)
    flat = cone.reshape(-1, n)
    best_flat = np.argmax(flat, axis=0)
    best = flat[best_flat, np.arange(n)]
    best_param = nodes[best_flat // (2 * y_res + 1)]
    if refine:
        # harmonic extensions peak on the cone boundary, so refine along the two rays
        propagator = LinePropagator(datum, poisson.params, (tg.t_min, tg.t_max))
        select = best > datum.values - REFINE_WINDOW * (1.0 + datum.values)
        x = datum.nodes
        for side, ray in ((-1.0, cone[:, 0, :]), (1.0, cone[:, -1, :])):
            ray_idx = np.argmax(ray, axis=0)

            def along_ray(ts, index, side=side):
                return propagator.evaluate_at(x[index] + side * alpha * ts, ts)

            best, best_param = _refine(along_ray, nodes, ray_idx, best, best_param, select, 'log', iterations)
    return _assemble(datum, best, best_param, 0.0, detach_tol)


# ---------------- Hardy-Littlewood ----------------
def _antiderivative(u0: GridFunction):
    """F(y) = integral of the piecewise-linear interpolant up to y (zero-extended line, periodic torus)"""
    x = u0.nodes
    v = u0.values
    h = u0.domain.spacing
    if isinstance(u0.domain, TorusDomain):
        x = np.append(x, 1.0)
        v = np.append(v, v[0])
    cells = 0.5 * (v[:-1] + v[1:]) * h
    cum = np.concatenate([[0.0], np.cumsum(cells)])
    total = cum[-1]
    periodic = isinstance(u0.domain, TorusDomain)

    def F(y):
        y = np.asarray(y, dtype=float)
        if periodic:
            wraps = np.floor(y)
            y = y - wraps
        k = np.clip(np.floor((y - x[0]) / h).astype(int), 0, x.size - 2)
        s = np.clip(y - x[k], 0.0, h)
        inside = cum[k] + s * v[k] + s * s * (v[k + 1] - v[k]) / (2.0 * h)
        if periodic:
            return wraps * total + inside
        return np.where(y <= x[0], 0.0, np.where(y >= x[-1], total, inside))

    return F


def hardy_littlewood(u0: GridFunction, radii: Optional[Sequence[float]] = None, refine: bool = True,
                     iterations: int = 48) -> GridFunction:
    """Centred Hardy-Littlewood maximal function of the piecewise-linear interpolant of |u0|"""
    if not isinstance(u0.domain, (LineDomain, TorusDomain)):
        raise ValueError("the Hardy-Littlewood maximal function is computed on line and torus grids")
    datum = u0.abs()
    h = datum.domain.spacing
    if radii is None:
        radii = np.exp(np.linspace(math.log(h / 10.0), math.log(datum.domain.length), 200))
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0):
        raise ValueError("radii must be positive")
    F = _antiderivative(datum)
    x = datum.nodes

    def average(r, index=None):
        xi = x if index is None else x[index]
        return (F(xi + r) - F(xi - r)) / (2.0 * r)

    averages = np.stack([average(r) for r in radii])
    best_idx = np.argmax(averages, axis=0)
    best = averages[best_idx, np.arange(datum.n)]
    best_r = radii[best_idx]
    if refine and radii.size > 1:
        select = np.ones(datum.n, dtype=bool)
        best, best_r = _refine(average, radii, best_idx, best, best_r, select, 'log', iterations)
    return datum.with_values(np.maximum(best, datum.values))


def resolved_rho_max(domain: ZonalSphereDomain, rho_cap: float = 0.98) -> float:
    """Largest rho whose Poisson kernel, of angular width 1 - rho, spans three colatitude cells"""
    rho_max = min(rho_cap, max(0.5, 1.0 - RHO_CELLS * math.pi / domain.n))
    if rho_max < rho_cap:
        logging.info(f"[GRID] rho_max lowered from {rho_cap} to {rho_max:.4f} for n={domain.n}")
    return rho_max


def default_time_grid(domain, spec: KernelSpec, n_t: int = 200, rho_max: float = 0.98) -> TimeGrid:
    """
    t in [h/10, 10 * length], log-spaced; the heat family uses b h^2 / 10 since its length scale is
    sqrt(t / b). The spherical Poisson family uses rho in [0, rho_max] geometric in 1 - rho, with
    rho_max lowered to what the grid resolves; spherical heat t in [0.01, 10].
    """
    spec = validate_kernel_spec(spec)
    if isinstance(spec, SphericalPoisson):
        return TimeGrid(0.0, resolved_rho_max(domain, rho_max), n_t, 'boundary')
    if isinstance(spec, SphericalHeat):
        return TimeGrid(0.01, 10.0, n_t, 'log')
    h = domain.spacing
    t_min = h / 10.0
    if isinstance(spec, Elliptic) and spec.params.regime == 'heat':
        t_min = spec.params.b * h * h / 10.0
    return TimeGrid(t_min, 10.0 * domain.length, n_t, 'log')
