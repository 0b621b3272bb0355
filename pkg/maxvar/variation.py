"""Discrete variation functionals on line, torus and zonal-sphere grids."""

import math
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from maxvar.evolution import GridFunction, ZonalSphereDomain
from maxvar.numerics import forward_differences

SUPPORTED_P = (1.0, 2.0, math.inf)


@dataclass(frozen=True)
class VariationReport:
    total_variation: float
    grad_norm_p: Dict[float, float] = field(default_factory=dict)
    lipschitz: float = 0.0


def _differences(f: GridFunction):
    return forward_differences(f.values, f.nodes, f.domain.period)


def total_variation(f: GridFunction) -> float:
    """sum |f_{i+1} - f_i|, with the wrap-around pair on the torus"""
    dv, _ = _differences(f)
    return float(np.sum(np.abs(dv)))


def grad_lp_norm(f: GridFunction, p: float) -> float:
    """
    (sum |df_i / h_i|^p h_i)^{1/p} over forward differences; p = inf gives the largest slope.
    On the zonal sphere the L^2 norm carries the surface weight 2 pi sin(theta); p = 1 stays the
    total variation along the meridian.
    """
    p = float(p)
    if p not in SUPPORTED_P:
        raise ValueError(f"p must be one of 1, 2, inf, got {p}")
    dv, dx = _differences(f)
    slopes = np.abs(dv / dx)
    if math.isinf(p):
        return float(slopes.max()) if slopes.size else 0.0
    weights = dx
    if p == 2.0 and isinstance(f.domain, ZonalSphereDomain):
        theta = f.nodes
        weights = 2.0 * math.pi * np.sin(0.5 * (theta[:-1] + theta[1:])) * dx
    return float(np.sum(slopes ** p * weights) ** (1.0 / p))


def lipschitz_constant(f: GridFunction) -> float:
    """Largest adjacent-pair slope; exact for functions piecewise linear on the grid"""
    return grad_lp_norm(f, math.inf)


def variation_report(f: GridFunction) -> VariationReport:
    norms = {p: grad_lp_norm(f, p) for p in SUPPORTED_P}
    return VariationReport(total_variation(f), norms, norms[math.inf])
