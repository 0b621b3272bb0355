"""
Kernel families: the elliptic family phi_{a,b} on R^d (space and Fourier
side), its periodization on T^d, and the Poisson and heat kernels of S^d.
"""

import math
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize, special

from maxvar.numerics import (DEFAULT_QUADRATURE, GegenbauerEval, QuadratureSpec,
                             gegenbauer_table, integrate_adaptive)

FOUR_PI = 4.0 * math.pi


class TruncationError(ValueError):
    """Spherical heat series truncated too early for the requested tail tolerance"""

    def __init__(self, message: str, tail_tol: float, given: Optional[int], required: Optional[int]):
        super().__init__(message)
        self.tail_tol = tail_tol
        self.given = given
        self.required = required


@dataclass(frozen=True)
class EllipticParams:
    a: float
    b: float
    d: int = 1

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError(f"a and b must be nonnegative, got a={self.a}, b={self.b}")
        if self.a == 0 and self.b == 0:
            raise ValueError("(a, b) = (0, 0) does not define a kernel")
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")

    @property
    def regime(self) -> str:
        if self.b == 0:
            return 'poisson'
        if self.a == 0:
            return 'heat'
        return 'elliptic'

    def label(self) -> str:
        return f"a={self.a:g},b={self.b:g},d={self.d}"


@dataclass(frozen=True)
class SchoenbergDensity:
    """The nonnegative density w(lam) of the mixing measure mu_{a,b,t}"""
    params: EllipticParams
    t: float

    def __post_init__(self):
        if self.params.a <= 0:
            raise ValueError("Schoenberg density needs a > 0; use the heat closed form for a = 0")
        if not self.t > 0:
            raise ValueError(f"t must be positive, got {self.t}")

    def __call__(self, lam):
        return schoenberg_density(self.params, self.t, lam)

    @property
    def peak(self) -> float:
        """Location where the exponential factor equals one (lam = 4 pi t / b)"""
        if self.params.b == 0:
            return math.inf
        return FOUR_PI * self.t / self.params.b


# ---------------- Kernel families ----------------
@dataclass(frozen=True)
class Elliptic:
    params: EllipticParams
    name: str = 'elliptic'


@dataclass(frozen=True)
class SphericalPoisson:
    d: int = 2
    name: str = 'spherical-poisson'

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"sphere dimension must be >= 1, got {self.d}")


@dataclass(frozen=True)
class SphericalHeat:
    d: int = 2
    truncation: Optional[int] = None
    tail_tol: float = 1e-10
    name: str = 'spherical-heat'

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"spherical heat kernel needs d >= 2, got {self.d}")
        if self.truncation is not None and self.truncation < 1:
            raise ValueError(f"truncation N must be >= 1, got {self.truncation}")


@dataclass(frozen=True)
class NonTangentialPoisson:
    aperture: float
    d: int = 1
    name: str = 'nontangential-poisson'

    def __post_init__(self):
        if self.aperture < 0:
            raise ValueError(f"aperture must be >= 0, got {self.aperture}")
        if self.d != 1:
            raise ValueError("the cone maximal function is evaluated on the line only (d = 1)")

    @property
    def params(self) -> EllipticParams:
        return EllipticParams(1.0, 0.0, 1)


KernelSpec = Union[Elliptic, SphericalPoisson, SphericalHeat, NonTangentialPoisson]


# ---------------- Fourier side ----------------
def multiplier_rate(params: EllipticParams, xi_norm):
    """s(xi) with phi_hat(xi, t) = exp(-t s(xi))"""
    xi = np.abs(np.asarray(xi_norm, dtype=float))
    a, b = params.a, params.b
    if a == 0:
        return (2.0 * math.pi * xi) ** 2 / b
    if b == 0:
        return 2.0 * math.pi * xi / math.sqrt(a)
    # (-b + sqrt(b^2 + 16 a pi^2 xi^2)) / (2a) written without cancellation
    q = 16.0 * a * math.pi ** 2 * xi ** 2
    return q / (2.0 * a * (b + np.sqrt(b * b + q)))


def elliptic_multiplier(params: EllipticParams, t, xi_norm):
    """exp(-t s(xi)); t and xi_norm broadcast against each other"""
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise ValueError(f"t must be positive, got {t}")
    if np.any(np.asarray(xi_norm) < 0):
        raise ValueError("xi_norm must be nonnegative")
    value = np.exp(-t * multiplier_rate(params, xi_norm))
    return float(value) if np.ndim(value) == 0 else value


def multiplier_pde_residual(params: EllipticParams, t: float, xi_norm: float) -> float:
    """
    Relative residual of a m_tt - b m_t - 4 pi^2 |xi|^2 m = 0 for m = exp(-t s(xi)),
    with the t-derivatives taken in closed form (m_t = -s m, m_tt = s^2 m).
    """
    s = float(multiplier_rate(params, xi_norm))
    m = elliptic_multiplier(params, t, xi_norm)
    lap = 4.0 * math.pi ** 2 * xi_norm ** 2 * m
    terms = (params.a * s * s * m, params.b * s * m, lap)
    scale = max(max(abs(v) for v in terms), 1e-300)
    return abs(terms[0] + terms[1] - terms[2]) / scale


# ---------------- Spatial side ----------------
def poisson_kernel(x_norm, t: float, d: int = 1):
    """Gamma((d+1)/2) pi^{-(d+1)/2} t / (|x|^2 + t^2)^{(d+1)/2}"""
    x = np.asarray(x_norm, dtype=float)
    c = math.gamma((d + 1) / 2.0) * math.pi ** (-(d + 1) / 2.0)
    return c * t / (x * x + t * t) ** ((d + 1) / 2.0)


def heat_kernel(x_norm, s: float, d: int = 1):
    """(4 pi s)^{-d/2} exp(-|x|^2 / 4s)"""
    x = np.asarray(x_norm, dtype=float)
    return (FOUR_PI * s) ** (-d / 2.0) * np.exp(-x * x / (4.0 * s))


def schoenberg_density(params: EllipticParams, t, lam):
    """
    w(lam) = e^{tb/2a} (t/sqrt a) e^{-lam b^2/(16 pi a)} e^{-pi t^2/(a lam)} lam^{-3/2},
    evaluated with the three exponentials combined into -(lam b - 4 pi t)^2 / (16 pi a lam).
    t and lam broadcast against each other.
    """
    if params.a <= 0:
        raise ValueError("Schoenberg density needs a > 0; use the heat closed form for a = 0")
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise ValueError(f"t must be positive, got {t}")
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("Schoenberg density is defined for lam > 0")
    a, b = params.a, params.b
    log_w = (np.log(t / math.sqrt(a)) - 1.5 * np.log(lam)
             - (lam * b - FOUR_PI * t) ** 2 / (4.0 * FOUR_PI * a * lam))
    value = np.exp(log_w)
    return float(value) if np.ndim(value) == 0 else value


LOG_DROP = 750.0


def _clipped_exp(v: float) -> float:
    return math.exp(min(v, 700.0))


class SchoenbergProfile:
    """
    log of the integrand of phi_{a,b}(x, t) in s = log(lam):
    E(s) = C - alpha s - A e^{-s} - B e^{s}, concave in s. The peak is found in
    closed form and the integral runs in units z of the peak width.
    """

    def __init__(self, params: EllipticParams, t: float, x_norm: float):
        a, b, d = params.a, params.b, params.d
        self.a, self.b, self.t, self.x2 = a, b, t, x_norm * x_norm
        self.alpha = 0.5 + d / 2.0
        self.log_pref = math.log(t / math.sqrt(a))
        log_a = math.log(math.pi * (self.x2 + t * t / a))
        b_coef = b * b / (4.0 * FOUR_PI * a)
        log_b = math.log(b_coef) if b_coef > 0 else -math.inf
        root = math.hypot(self.alpha, math.exp(0.5 * (math.log(4.0) + log_a + log_b))) if b_coef > 0 else self.alpha
        # B y^2 + alpha y - A = 0 with y = e^s
        self.s_peak = math.log(2.0) + log_a - math.log(self.alpha + root)
        curvature = _clipped_exp(log_a - self.s_peak) + _clipped_exp(log_b + self.s_peak)
        self.width = 1.0 / math.sqrt(curvature)
        self.log_peak = self.log_value(self.s_peak)

    def log_value(self, s: float) -> float:
        # (lam b - 4 pi t)^2 / lam written as a square of half powers
        q = self.b * _clipped_exp(0.5 * s) - FOUR_PI * self.t * _clipped_exp(-0.5 * s)
        return (self.log_pref - self.alpha * s - math.pi * self.x2 * _clipped_exp(-s)
                - q * q / (4.0 * FOUR_PI * self.a))

    def relative(self, z: float) -> float:
        drop = self.log_value(self.s_peak + self.width * z) - self.log_peak
        return math.exp(drop) if drop > -745.0 else 0.0

    def _edge(self, direction: float) -> float:
        step = 1.0
        while self.log_value(self.s_peak + direction * step * self.width) > self.log_peak - LOG_DROP:
            step *= 2.0
        return direction * optimize.brentq(
            lambda z: self.log_value(self.s_peak + direction * z * self.width) - self.log_peak + LOG_DROP,
            0.0, step)

    def support(self) -> Tuple[float, float]:
        return self._edge(-1.0), self._edge(1.0)


def elliptic_kernel(params: EllipticParams, t: float, x_norm: float,
                    spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """
    phi_{a,b}(x, t). b = 0 is the Poisson kernel at time t/sqrt(a); a = 0 is the
    heat kernel at time t/b; otherwise the Schoenberg representation is integrated.
    """
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if x_norm < 0:
        raise ValueError(f"|x| must be nonnegative, got {x_norm}")
    if params.regime == 'poisson':
        return float(poisson_kernel(x_norm, t / math.sqrt(params.a), params.d))
    if params.regime == 'heat':
        return float(heat_kernel(x_norm, t / params.b, params.d))

    profile = SchoenbergProfile(params, t, x_norm)
    lo, hi = profile.support()
    points = [z for z in (-10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0) if lo < z < hi]
    points += [float(z) for z in np.arange(20.0, hi, 20.0)]
    scaled = integrate_adaptive(profile.relative, lo, hi, spec, points)
    value = scaled * profile.width * math.exp(profile.log_peak)
    logging.debug(f"elliptic_kernel {params.label()} t={t:g} |x|={x_norm:g} -> {value:.12g} "
                  f"(peak lam={math.exp(profile.s_peak):.3g})")
    return max(value, 0.0)


def schoenberg_nodes(params: EllipticParams, t_min: float, t_max: float, step: float = 0.1) -> Tuple[np.ndarray, float]:
    """
    Log-spaced lam nodes on which the trapezoid rule in log(lam) integrates the
    Schoenberg density accurately for every t in [t_min, t_max]. Returns (lams, step).
    """
    if params.a <= 0 or params.b <= 0:
        raise ValueError("Schoenberg nodes are only needed for a > 0 and b > 0")
    if not 0 < t_min <= t_max:
        raise ValueError(f"need 0 < t_min <= t_max, got {t_min}, {t_max}")
    a, b = params.a, params.b
    margin = 60.0
    lam_lo = math.pi * t_min ** 2 / (a * (margin + t_min * b / (2.0 * a)))
    lam_hi = (margin + t_max * b / (2.0 * a)) * 4.0 * FOUR_PI * a / (b * b)
    lam_hi = max(lam_hi, 4.0 * FOUR_PI * t_max / b)
    # the density narrows like 2 sqrt(a / (b t)) in log(lam) at large t
    step = min(step, 2.0 * math.sqrt(a / (b * t_max)) / 3.0)
    s = np.arange(math.log(lam_lo), math.log(lam_hi) + step, step)
    return np.exp(s), step


def schoenberg_weights(params: EllipticParams, t: float, lams: np.ndarray, step: float) -> np.ndarray:
    """Trapezoid weights w(lam_k) lam_k * step of the mixing measure at time t"""
    return schoenberg_density(params, t, lams) * lams * step


def elliptic_kernel_values(params: EllipticParams, t: float, radii,
                           nodes: Optional[Tuple[np.ndarray, float]] = None) -> np.ndarray:
    """Vectorized phi_{a,b}(r, t) for many radii (Gaussian-mixture path for a, b > 0)"""
    r = np.abs(np.asarray(radii, dtype=float))
    a, b, d = params.a, params.b, params.d
    if params.regime == 'poisson':
        return poisson_kernel(r, t / math.sqrt(a), d)
    if params.regime == 'heat':
        return heat_kernel(r, t / b, d)
    lams, step = nodes if nodes is not None else schoenberg_nodes(params, t, t)
    w = schoenberg_weights(params, t, lams, step)
    gauss = lams[:, None] ** (-d / 2.0) * np.exp(-math.pi * r.ravel()[None, :] ** 2 / lams[:, None])
    return (w @ gauss).reshape(r.shape)


def elliptic_dilation_check(params: EllipticParams, t: float, x_norm: float,
                            spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """
    Relative mismatch of the dilation reducing phi_{a,b} to a canonical kernel:
    phi_{a,b}(x,t) = c^d phi_{1,1}(c x, t b/a) with c = b/sqrt(a), and
    phi_{a,0}(x,t) = P(x, t/sqrt(a)).
    """
    direct = elliptic_kernel(params, t, x_norm, spec)
    a, b, d = params.a, params.b, params.d
    if params.regime == 'poisson':
        reduced = elliptic_kernel(EllipticParams(1.0, 0.0, d), t / math.sqrt(a), x_norm, spec)
    elif params.regime == 'heat':
        reduced = float(heat_kernel(x_norm, t / b, d))
    else:
        c = b / math.sqrt(a)
        reduced = c ** d * elliptic_kernel(EllipticParams(1.0, 1.0, d), t * b / a, c * x_norm, spec)
    return abs(direct - reduced) / max(abs(direct), 1e-300)


def tail_mass(params: EllipticParams, t: float, delta: float,
              spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Mass of phi_{a,b}(., t) outside the ball of radius delta (delta = 0 gives the total mass)"""
    if delta < 0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    d = params.d
    sphere = 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)
    nodes = schoenberg_nodes(params, t, t) if params.regime == 'elliptic' else None
    scales = []
    if params.a > 0:
        scales.append(t / math.sqrt(params.a))
    if params.b > 0:
        scales.append(math.sqrt(t / params.b))
    length = max(scales)

    def integrand(r: float) -> float:
        return sphere * r ** (d - 1) * float(elliptic_kernel_values(params, t, r, nodes))

    return integrate_adaptive(integrand, delta, math.inf, spec.with_radius(max(20.0 * length, 1.0)),
                              [delta + length, delta + 4.0 * length])


# ---------------- Periodization ----------------
def fourier_cutoff(params: EllipticParams, t: float, decay: float = 40.0) -> int:
    """Smallest |n| beyond which the multiplier is below e^{-decay}"""
    a, b = params.a, params.b
    target = decay / t
    if a == 0:
        n = math.sqrt(target * b) / (2.0 * math.pi)
    else:
        n = math.sqrt(max((2.0 * a * target + b) ** 2 - b * b, 0.0)) / (4.0 * math.pi * math.sqrt(a))
    return int(math.ceil(n)) + 1


def _lattice_indices(d: int, radius: int, shell_only: bool) -> np.ndarray:
    axes = [np.arange(-radius, radius + 1)] * d
    grid = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, d)
    if shell_only and radius > 0:
        grid = grid[np.max(np.abs(grid), axis=1) == radius]
    return grid


def periodic_kernel_fourier(params: EllipticParams, t: float, x) -> float:
    """Psi(x,t) = sum_n Psi_hat(n,t) e^{2 pi i x.n}"""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    d = params.d
    cutoff = fourier_cutoff(params, t)
    if d == 1:
        n = np.arange(1, cutoff + 1)
        m = elliptic_multiplier(params, t, n)
        return float(1.0 + 2.0 * np.sum(m * np.cos(2.0 * math.pi * n * xs[0])))
    lattice = _lattice_indices(d, cutoff, shell_only=False)
    m = elliptic_multiplier(params, t, np.linalg.norm(lattice, axis=1))
    return float(np.sum(m * np.cos(2.0 * math.pi * lattice @ xs)))


def periodic_kernel_lattice(params: EllipticParams, t: float, x, cutoff: float = 1e-14,
                            max_shells: int = 4000) -> Optional[float]:
    """Psi(x,t) = sum_n phi(x + n, t); None when the shells do not decay below cutoff"""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    d = params.d
    nodes = schoenberg_nodes(params, t, t) if params.regime == 'elliptic' else None
    total = 0.0
    for k in range(max_shells + 1):
        shell = _lattice_indices(d, k, shell_only=True)
        values = elliptic_kernel_values(params, t, np.linalg.norm(xs[None, :] + shell, axis=1), nodes)
        total += float(np.sum(values))
        if k > 0 and float(np.max(values)) < cutoff:
            return total
    return None


def periodic_kernel(params: EllipticParams, t: float, x, cutoff: float = 1e-14, max_shells: int = 4000) -> float:
    """Periodized kernel; Fourier series when the first multiplier is below 1/2, lattice sum otherwise"""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if xs.size != params.d:
        raise ValueError(f"point has {xs.size} coordinates, kernel dimension is {params.d}")
    xs = xs - np.round(xs)
    if elliptic_multiplier(params, t, 1.0) < 0.5:
        return periodic_kernel_fourier(params, t, xs)
    value = periodic_kernel_lattice(params, t, xs, cutoff, max_shells)
    if value is None:
        logging.warning(f"Lattice sum for {params.label()} t={t:g} did not decay within {max_shells} shells; "
                        f"using the Fourier series")
        return periodic_kernel_fourier(params, t, xs)
    return value


# ---------------- Sphere ----------------
def spherical_surface_area(d: int) -> float:
    """sigma_d = 2 pi^{(d+1)/2} / Gamma((d+1)/2)"""
    return 2.0 * math.pi ** ((d + 1) / 2.0) / math.gamma((d + 1) / 2.0)


def spherical_poisson(cos_angle, rho: float, d: int = 2):
    if not 0 <= rho < 1:
        raise ValueError(f"rho must satisfy 0 <= rho < 1, got {rho}")
    c = np.asarray(cos_angle, dtype=float)
    if np.any(np.abs(c) > 1.0 + 1e-12):
        raise ValueError("cos_angle must lie in [-1, 1]")
    value = (1.0 - rho * rho) / (spherical_surface_area(d) * (rho * rho - 2.0 * rho * c + 1.0) ** ((d + 1) / 2.0))
    return float(value) if np.ndim(value) == 0 else value


def heat_term_bound(n: int, t: float, d: int) -> float:
    """e^{-t n(n+d-1)} ((n+lam)/lam) C_n^lam(1)"""
    lam = (d - 1) / 2.0
    log_c1 = special.gammaln(n + 2.0 * lam) - special.gammaln(2.0 * lam) - special.gammaln(n + 1.0)
    return math.exp(-t * n * (n + d - 1) + math.log((n + lam) / lam) + log_c1)


def heat_truncation(t: float, d: int = 2, tail_tol: float = 1e-10, n_min: int = 8, n_max: int = 100000) -> int:
    """Smallest N >= n_min whose term bound is below tail_tol"""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    n = n_min
    while heat_term_bound(n, t, d) >= tail_tol:
        n += 1
        if n > n_max:
            raise TruncationError(f"no truncation below {n_max} reaches tail_tol={tail_tol} at t={t}",
                                  tail_tol, None, None)
    return n


def heat_coefficients(t: float, d: int, n_terms: int) -> np.ndarray:
    """Series coefficients e^{-t n(n+d-1)} (n+lam)/lam / sigma_d for n = 0..n_terms"""
    lam = (d - 1) / 2.0
    n = np.arange(n_terms + 1)
    return np.exp(-t * n * (n + d - 1)) * (n + lam) / lam / spherical_surface_area(d)


def resolve_heat_truncation(t: float, d: int, truncation: Optional[int], tail_tol: float) -> int:
    required = heat_truncation(t, d, tail_tol)
    if truncation is None:
        return required
    if heat_term_bound(truncation, t, d) >= tail_tol:
        raise TruncationError(f"truncation N={truncation} too small at t={t}; need N >= {required}",
                              tail_tol, truncation, required)
    return truncation


def spherical_heat(cos_angle, t: float, d: int = 2, truncation: Optional[int] = None, tail_tol: float = 1e-10):
    """Truncated Gegenbauer series of the heat kernel on S^d"""
    if d < 2:
        raise ValueError(f"spherical heat kernel needs d >= 2, got {d}")
    n_terms = resolve_heat_truncation(t, d, truncation, tail_tol)
    c = np.asarray(cos_angle, dtype=float)
    table = gegenbauer_table(GegenbauerEval.for_sphere(d, n_terms), np.clip(c, -1.0, 1.0))
    coeffs = heat_coefficients(t, d, n_terms)
    value = np.tensordot(coeffs, table, axes=1)
    if np.any(value < -tail_tol):
        raise TruncationError(f"truncated heat kernel reached {float(np.min(value)):.3e} < -tail_tol at t={t}",
                              tail_tol, n_terms, None)
    value = np.maximum(value, 0.0)
    return float(value) if np.ndim(value) == 0 else value


def validate_kernel_spec(spec: KernelSpec) -> KernelSpec:
    if not isinstance(spec, (Elliptic, SphericalPoisson, SphericalHeat, NonTangentialPoisson)):
        raise ValueError(f"unknown kernel family {spec!r}")
    return spec
