"""
Evolutions u(., t) = kernel(., t) * |u0| on the line, the torus and the zonal sphere.

Samples on a grid stand for their piecewise-linear interpolant. On the line the
interpolant is extended by zero outside [x_min, x_max] and convolved exactly:
the weight of node j at node i is the kernel integrated against the hat
function of node j, i.e. a second difference of the kernel's second
antiderivative. Closed forms exist for the Poisson and heat kernels; the
elliptic family is a Gaussian mixture through its Schoenberg representation.
"""

import math
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import ClassVar, Optional, Tuple, Union

import numpy as np
from scipy import signal, special

from maxvar.kernels import (FOUR_PI, EllipticParams, SphericalHeat, SphericalPoisson,
                            elliptic_multiplier, fourier_cutoff, heat_coefficients,
                            resolve_heat_truncation, schoenberg_nodes, schoenberg_weights,
                            spherical_surface_area)
from maxvar.numerics import (GegenbauerEval, dft_forward, dft_frequencies, dft_inverse,
                             gauss_legendre, gegenbauer_table)


# ---------------- Domains ----------------
@dataclass(frozen=True)
class LineDomain:
    x_min: float
    x_max: float
    n: int
    kind: ClassVar[str] = 'line'
    uniform: ClassVar[bool] = True
    period: ClassVar[Optional[float]] = None

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"grid needs n >= 3 points, got {self.n}")
        if not self.x_max > self.x_min:
            raise ValueError(f"need x_min < x_max, got [{self.x_min}, {self.x_max}]")

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    def refined(self) -> 'LineDomain':
        return LineDomain(self.x_min, self.x_max, 2 * self.n - 1)


@dataclass(frozen=True)
class TorusDomain:
    n: int
    d: int = 1
    kind: ClassVar[str] = 'torus'
    uniform: ClassVar[bool] = True
    period: ClassVar[Optional[float]] = 1.0

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"grid needs n >= 3 points, got {self.n}")
        if self.d != 1:
            raise ValueError(f"torus grids are one-dimensional, got d={self.d}")

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n) / self.n

    @property
    def spacing(self) -> float:
        return 1.0 / self.n

    @property
    def length(self) -> float:
        return 1.0

    def refined(self) -> 'TorusDomain':
        return TorusDomain(2 * self.n, self.d)


@dataclass(frozen=True)
class ZonalSphereDomain:
    """Colatitudes theta_i in (0, pi), ascending, at Gauss-Legendre nodes in cos(theta)"""
    n: int
    d: int = 2
    kind: ClassVar[str] = 'sphere'
    uniform: ClassVar[bool] = False
    period: ClassVar[Optional[float]] = None

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"grid needs n >= 3 points, got {self.n}")
        if self.d != 2:
            raise ValueError(f"zonal sphere grids are implemented for d = 2, got d={self.d}")

    @cached_property
    def _rule(self) -> Tuple[np.ndarray, np.ndarray]:
        x, w = gauss_legendre(self.n)
        return x[::-1].copy(), w[::-1].copy()

    @property
    def cosines(self) -> np.ndarray:
        return self._rule[0]

    @property
    def weights(self) -> np.ndarray:
        return self._rule[1]

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.arccos(self.cosines)

    @property
    def spacing(self) -> float:
        raise ValueError("zonal sphere grids are not uniform")

    @property
    def length(self) -> float:
        return math.pi

    def refined(self) -> 'ZonalSphereDomain':
        return ZonalSphereDomain(2 * self.n, self.d)


Domain = Union[LineDomain, TorusDomain, ZonalSphereDomain]


@dataclass(frozen=True, eq=False)
class GridFunction:
    domain: Domain
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size != self.domain.n:
            raise ValueError(f"expected {self.domain.n} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid function values must be finite")
        object.__setattr__(self, 'values', values)

    @property
    def nodes(self) -> np.ndarray:
        return self.domain.nodes

    @property
    def n(self) -> int:
        return self.domain.n

    def abs(self) -> 'GridFunction':
        return GridFunction(self.domain, np.abs(self.values))

    def with_values(self, values) -> 'GridFunction':
        return GridFunction(self.domain, values)


@dataclass(frozen=True)
class TimeGrid:
    """
    Log-spaced times, or a rho-grid in [0, 1) for the spherical Poisson family:
    'linear' in rho, or 'boundary', geometric in 1 - rho from rho = 0 up to rho_max.
    """
    t_min: float
    t_max: float
    n_t: int = 200
    scale: str = 'log'

    def __post_init__(self):
        if self.n_t < 2:
            raise ValueError(f"time grid needs n_t >= 2, got {self.n_t}")
        if self.scale == 'log':
            if not 0 < self.t_min < self.t_max:
                raise ValueError(f"need 0 < t_min < t_max, got {self.t_min}, {self.t_max}")
        elif self.scale in ('linear', 'boundary'):
            if not 0 <= self.t_min < self.t_max < 1:
                raise ValueError(f"rho-grid needs 0 <= rho_min < rho_max < 1, got {self.t_min}, {self.t_max}")
        else:
            raise ValueError(f"unknown time-grid scale {self.scale!r}")

    @property
    def nodes(self) -> np.ndarray:
        if self.scale == 'log':
            return np.exp(np.linspace(math.log(self.t_min), math.log(self.t_max), self.n_t))
        if self.scale == 'boundary':
            return 1.0 - np.exp(np.linspace(math.log1p(-self.t_min), math.log1p(-self.t_max), self.n_t))
        return np.linspace(self.t_min, self.t_max, self.n_t)

    def refined(self) -> 'TimeGrid':
        """2 n_t - 1 nodes containing the current ones"""
        return TimeGrid(self.t_min, self.t_max, 2 * self.n_t - 1, self.scale)


# ---------------- Line ----------------
def _gauss_profile(z, s):
    """Second antiderivative of the heat kernel at time s, minus |z|/2"""
    az = np.abs(z)
    r = 2.0 * np.sqrt(s)
    return -0.5 * az * special.erfc(az / r) + np.sqrt(s / math.pi) * np.expm1(-(az / r) ** 2)


def _poisson_profile(z, tau):
    """Second antiderivative of the Poisson kernel at time tau, minus |z|/2"""
    az = np.abs(z)
    return -az * np.arctan2(tau, az) / math.pi - tau / (2.0 * math.pi) * np.log1p((az / tau) ** 2)


def hat_weights(profile, z, h: float, scale):
    """Kernel integrated against the unit hat of half-width h centred at -z"""
    tent = np.maximum(h - np.abs(z), 0.0)
    second = profile(z + h, scale) - 2.0 * profile(z, scale) + profile(z - h, scale)
    return np.maximum((tent + second) / h, 0.0)


def _point_index(n: int, index) -> np.ndarray:
    if index is None:
        return np.arange(n)
    index = np.asarray(index, dtype=int)
    if index.ndim != 1 or np.any(index < 0) or np.any(index >= n):
        raise ValueError("point index must be a 1-D array of grid indices")
    return index


def _closed_form(params: EllipticParams):
    """(profile, time -> profile scale) for the Poisson and heat regimes"""
    if params.regime == 'poisson':
        return _poisson_profile, lambda t: np.asarray(t, dtype=float) / math.sqrt(params.a)
    if params.regime == 'heat':
        return _gauss_profile, lambda t: np.asarray(t, dtype=float) / params.b
    raise ValueError(f"no closed form for {params.label()}")


class LinePropagator:
    """Exact convolution of a zero-extended piecewise-linear datum with phi_{a,b}(., t), t in t_range"""

    def __init__(self, u0: GridFunction, params: EllipticParams, t_range: Tuple[float, float],
                 schoenberg_step: float = 0.1):
        if not isinstance(u0.domain, LineDomain):
            raise ValueError("LinePropagator needs a line grid")
        if params.d != 1:
            raise ValueError(f"line evolution needs d = 1, got d={params.d}")
        t_lo, t_hi = float(t_range[0]), float(t_range[1])
        if not 0 < t_lo <= t_hi:
            raise ValueError(f"need 0 < t_lo <= t_hi, got {t_lo}, {t_hi}")
        self.u0 = u0.abs()
        self.params = params
        self.t_range = (t_lo, t_hi)
        n = u0.n
        self.h = u0.domain.spacing
        self.lags = np.arange(-(n - 1), n) * self.h
        self._mixture = None
        if params.regime == 'elliptic':
            self.lams, self.step = schoenberg_nodes(params, t_lo, t_hi, schoenberg_step)
            gauss = hat_weights(_gauss_profile, self.lags[None, :], self.h, (self.lams / FOUR_PI)[:, None])
            self._mixture = self.convolve(gauss)
            logging.debug(f"LinePropagator {params.label()}: {self.lams.size} Gaussian components")

    def convolve(self, weights: np.ndarray) -> np.ndarray:
        n = self.u0.n
        u = self.u0.values.reshape((1,) * (weights.ndim - 1) + (n,))
        full = signal.fftconvolve(u, weights, mode='full', axes=-1)
        return np.maximum(full[..., n - 1:2 * n - 1], 0.0)

    def _check_times(self, ts: np.ndarray):
        lo, hi = self.t_range
        if np.any(ts < lo * (1.0 - 1e-12)) or np.any(ts > hi * (1.0 + 1e-12)):
            raise ValueError(f"times outside the propagator range [{lo:g}, {hi:g}]")

    def _mixture_weights(self, ts: np.ndarray) -> np.ndarray:
        return schoenberg_weights(self.params, ts[:, None], self.lams[None, :], self.step)

    def evolve_many(self, ts, offset: float = 0.0) -> np.ndarray:
        """u(x_i + offset, t_k) for every time; shape (len(ts), n)"""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        self._check_times(ts)
        if self._mixture is not None:
            if offset != 0.0:
                raise ValueError("off-grid evaluation is only available for the Poisson and heat regimes")
            return self._mixture_weights(ts) @ self._mixture
        profile, scale = _closed_form(self.params)
        weights = hat_weights(profile, self.lags[None, :] + offset, self.h, scale(ts)[:, None])
        return self.convolve(weights)

    def evolve(self, t: float) -> GridFunction:
        return self.u0.with_values(self.evolve_many([t])[0])

    def evaluate(self, ts, index=None) -> np.ndarray:
        """u(x_i, t_i): each selected grid point (all by default) with its own time"""
        index = _point_index(self.u0.n, index)
        ts = np.asarray(ts, dtype=float)
        if ts.shape != index.shape:
            raise ValueError(f"need one time per selected grid point, got shape {ts.shape}")
        self._check_times(ts)
        if self._mixture is not None:
            return np.einsum('im,mi->i', self._mixture_weights(ts), self._mixture[:, index])
        return self.evaluate_at(self.u0.nodes[index], ts)

    def evaluate_at(self, ys, ts) -> np.ndarray:
        """u(y_k, t_k) at arbitrary points (Poisson and heat regimes)"""
        ys = np.asarray(ys, dtype=float)
        ts = np.asarray(ts, dtype=float)
        profile, scale = _closed_form(self.params)
        z = ys.reshape(-1, 1) - self.u0.nodes[None, :]
        weights = hat_weights(profile, z, self.h, scale(ts).reshape(-1, 1))
        return np.maximum(weights @ self.u0.values, 0.0).reshape(ys.shape)


def evolve_line(u0: GridFunction, params: EllipticParams, t: float, schoenberg_step: float = 0.1) -> GridFunction:
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    return LinePropagator(u0, params, (t, t), schoenberg_step).evolve(t)


def poisson_values_at(u0: GridFunction, ys, ts) -> np.ndarray:
    """Harmonic extension of |u0| to the upper half-plane at the points (y_k, t_k)"""
    ts = np.asarray(ts, dtype=float)
    if np.any(ts <= 0):
        raise ValueError("t must be positive")
    propagator = LinePropagator(u0, EllipticParams(1.0, 0.0, 1), (float(ts.min()), float(ts.max())))
    return propagator.evaluate_at(ys, ts)


def poisson_halfplane(u0: GridFunction, y: float, t: float) -> float:
    return float(poisson_values_at(u0, np.array([y]), np.array([t]))[0])


@lru_cache(maxsize=4)
def _cone_weights(domain: LineDomain, t_nodes: Tuple[float, ...], aperture: float, y_res: int) -> np.ndarray:
    """Poisson hat weights for every (t, cone offset); shape (n_t, 2 y_res + 1, 2n - 1)"""
    h = domain.spacing
    lags = np.arange(-(domain.n - 1), domain.n) * h
    ts = np.asarray(t_nodes)
    offsets = aperture * ts[:, None] * np.arange(-y_res, y_res + 1)[None, :] / y_res
    z = lags[None, None, :] + offsets[:, :, None]
    return hat_weights(_poisson_profile, z, h, ts[:, None, None])


def cone_values(u0: GridFunction, ts, aperture: float, y_res: int) -> np.ndarray:
    """Harmonic extension at (x_i + aperture t k / y_res, t); shape (n_t, 2 y_res + 1, n)"""
    if not isinstance(u0.domain, LineDomain):
        raise ValueError("the cone operator is defined on line grids")
    weights = _cone_weights(u0.domain, tuple(float(t) for t in ts), float(aperture), int(y_res))
    propagator = LinePropagator(u0, EllipticParams(1.0, 0.0, 1), (float(np.min(ts)), float(np.max(ts))))
    return propagator.convolve(weights)


# ---------------- Torus ----------------
class TorusPropagator:
    """
    Multiplier evolution on the torus. 'trigonometric' applies elliptic_multiplier to the DFT
    of the samples; 'linear' convolves the piecewise-linear interpolant exactly, which folds
    the aliased multiplier weighted by sinc^2 into each DFT coefficient.
    """

    def __init__(self, u0: GridFunction, params: EllipticParams, interpolant: str = 'linear'):
        if not isinstance(u0.domain, TorusDomain):
            raise ValueError("TorusPropagator needs a torus grid")
        if interpolant not in ('linear', 'trigonometric'):
            raise ValueError(f"unknown interpolant {interpolant!r}")
        self.u0 = u0.abs()
        self.params = params
        self.interpolant = interpolant
        self.coeffs = dft_forward(self.u0.values)
        self.freqs = dft_frequencies(u0.n)

    def multipliers(self, ts) -> np.ndarray:
        """Per-time multipliers on dft_frequencies(n); shape (len(ts), n)"""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if np.any(ts <= 0):
            raise ValueError("t must be positive")
        n = self.u0.n
        if self.interpolant == 'trigonometric':
            return elliptic_multiplier(self.params, ts[:, None], np.abs(self.freqs)[None, :])
        images = fourier_cutoff(self.params, float(ts.min())) // n + 2
        shifted = self.freqs[None, :] + n * np.arange(-images, images + 1)[:, None]
        damping = np.sinc(shifted / n) ** 2
        m = elliptic_multiplier(self.params, ts[:, None, None], np.abs(shifted)[None, :, :])
        return np.sum(m * damping[None, :, :], axis=1)

    def evolve_many(self, ts) -> np.ndarray:
        spectra = self.coeffs[None, :] * self.multipliers(ts)
        values = np.real(np.fft.ifft(np.fft.ifftshift(spectra, axes=-1) * self.u0.n, axis=-1))
        return np.maximum(values, 0.0) if self.interpolant == 'linear' else values

    def evolve(self, t: float) -> GridFunction:
        return self.u0.with_values(self.evolve_many([t])[0])

    def evaluate(self, ts, index=None) -> np.ndarray:
        index = _point_index(self.u0.n, index)
        ts = np.asarray(ts, dtype=float)
        if ts.shape != index.shape:
            raise ValueError(f"need one time per selected grid point, got shape {ts.shape}")
        phases = np.exp(2j * math.pi * np.outer(index, self.freqs) / self.u0.n)
        values = np.real(np.sum(self.multipliers(ts) * self.coeffs[None, :] * phases, axis=1))
        return np.maximum(values, 0.0) if self.interpolant == 'linear' else values


def evolve_torus(u0: GridFunction, params: EllipticParams, t: float, interpolant: str = 'trigonometric') -> GridFunction:
    """DFT, multiply coefficient k by elliptic_multiplier(params, t, |k|), inverse DFT"""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if interpolant == 'trigonometric':
        if not isinstance(u0.domain, TorusDomain):
            raise ValueError("evolve_torus needs a torus grid")
        coeffs = dft_forward(np.abs(u0.values))
        m = elliptic_multiplier(params, t, np.abs(dft_frequencies(u0.n)))
        return u0.with_values(dft_inverse(coeffs * m))
    return TorusPropagator(u0, params, interpolant).evolve(t)


# ---------------- Zonal sphere ----------------
@lru_cache(maxsize=4)
def _poisson_matrices(domain: ZonalSphereDomain, rhos: Tuple[float, ...], azimuth_nodes: int) -> np.ndarray:
    rows = np.arange(domain.n)
    return np.stack([_poisson_matrix(domain, rows, np.full(domain.n, rho), azimuth_nodes) for rho in rhos])


def _poisson_matrix(domain: ZonalSphereDomain, rows: np.ndarray, rho_rows: np.ndarray, azimuth_nodes: int) -> np.ndarray:
    """Row k integrates the Poisson kernel at rho_rows[k], seen from colatitude rows[k], against the datum"""
    c, s = domain.cosines, np.sin(domain.nodes)
    phi = 2.0 * math.pi * np.arange(azimuth_nodes) / azimuth_nodes
    cos_gamma = (c[rows, None, None] * c[None, :, None]
                 + s[rows, None, None] * s[None, :, None] * np.cos(phi)[None, None, :])
    rho = rho_rows[:, None, None]
    denominator = (rho * rho - 2.0 * rho * np.clip(cos_gamma, -1.0, 1.0) + 1.0) ** ((domain.d + 1) / 2.0)
    kernel = (1.0 - rho * rho) / (spherical_surface_area(domain.d) * denominator)
    return kernel.mean(axis=2) * 2.0 * math.pi * domain.weights[None, :]


class SpherePropagator:
    """
    Zonal evolution on S^2: Gauss-Legendre in cos(theta') times an azimuth trapezoid for the
    Poisson kernel; for the heat kernel the azimuth integral of each Legendre term is
    2 pi P_n(cos theta) P_n(cos theta') by the addition theorem.
    """

    def __init__(self, u0: GridFunction, family: Union[SphericalPoisson, SphericalHeat],
                 param_range: Optional[Tuple[float, float]] = None, azimuth_nodes: int = 128):
        if not isinstance(u0.domain, ZonalSphereDomain):
            raise ValueError("SpherePropagator needs a zonal sphere grid")
        if family.d != u0.domain.d:
            raise ValueError(f"kernel dimension {family.d} does not match the sphere grid d={u0.domain.d}")
        self.u0 = u0.abs()
        self.family = family
        self.azimuth_nodes = azimuth_nodes
        if isinstance(family, SphericalHeat):
            if param_range is None:
                raise ValueError("the heat family needs a time range")
            self.t_min = float(param_range[0])
            if not self.t_min > 0:
                raise ValueError(f"t must be positive, got {self.t_min}")
            self.degree = resolve_heat_truncation(self.t_min, family.d, family.truncation, family.tail_tol)
            domain = u0.domain
            self.legendre = gegenbauer_table(GegenbauerEval.for_sphere(family.d, self.degree), domain.cosines)
            self.moments = 2.0 * math.pi * self.legendre @ (domain.weights * self.u0.values)
            logging.debug(f"SpherePropagator heat: degree {self.degree} for t >= {self.t_min:g}")

    @property
    def is_heat(self) -> bool:
        return isinstance(self.family, SphericalHeat)

    def _check(self, params: np.ndarray):
        if self.is_heat:
            if np.any(params < self.t_min * (1.0 - 1e-12)):
                raise ValueError(f"times below {self.t_min:g} need a longer series")
        elif np.any(params < 0) or np.any(params >= 1):
            raise ValueError("rho must satisfy 0 <= rho < 1")

    def _heat_coefficients(self, ts: np.ndarray) -> np.ndarray:
        return np.stack([heat_coefficients(t, self.family.d, self.degree) for t in ts])

    def evolve_many(self, params) -> np.ndarray:
        params = np.atleast_1d(np.asarray(params, dtype=float))
        self._check(params)
        if self.is_heat:
            return (self._heat_coefficients(params) * self.moments[None, :]) @ self.legendre
        stack = _poisson_matrices(self.u0.domain, tuple(float(r) for r in params), self.azimuth_nodes)
        return stack @ self.u0.values

    def evolve(self, param: float) -> GridFunction:
        return self.u0.with_values(self.evolve_many([param])[0])

    def evaluate(self, params, index=None) -> np.ndarray:
        index = _point_index(self.u0.n, index)
        params = np.asarray(params, dtype=float)
        if params.shape != index.shape:
            raise ValueError(f"need one parameter per selected grid point, got shape {params.shape}")
        self._check(params)
        if self.is_heat:
            return np.einsum('kn,n,nk->k', self._heat_coefficients(params), self.moments, self.legendre[:, index])
        return _poisson_matrix(self.u0.domain, index, params, self.azimuth_nodes) @ self.u0.values


def evolve_zonal_sphere(u0: GridFunction, family: Union[SphericalPoisson, SphericalHeat], param: float,
                        azimuth_nodes: int = 128) -> GridFunction:
    """param is rho for the Poisson family and t for the heat family"""
    param_range = (param, param) if isinstance(family, SphericalHeat) else None
    return SpherePropagator(u0, family, param_range, azimuth_nodes).evolve(param)


def smoothed_datum(u0: GridFunction, params: EllipticParams, eps: float) -> GridFunction:
    """u_eps = phi(., eps) * |u0| on the line or torus grid"""
    if isinstance(u0.domain, LineDomain):
        return evolve_line(u0, params, eps)
    if isinstance(u0.domain, TorusDomain):
        return TorusPropagator(u0, params).evolve(eps)
    raise ValueError(f"smoothing is defined on line and torus grids, got {u0.domain.kind}")
