"""
Shared numerical primitives: adaptive quadrature, the DFT contract,
Gegenbauer polynomials, finite differences and a few piecewise-linear helpers.
"""

import math
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.stats import qmc


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance"""

    def __init__(self, message: str, estimate: float, error_bound: float, subdivisions: int):
        super().__init__(f"{message} (estimate={estimate!r}, error_bound={error_bound!r}, "
                         f"subdivisions={subdivisions})")
        self.estimate = estimate
        self.error_bound = error_bound
        self.subdivisions = subdivisions


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2000
    truncation_radius: float = 50.0

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_subdivisions < 1:
            raise ValueError(f"max_subdivisions must be >= 1, got {self.max_subdivisions}")
        if not self.truncation_radius > 0:
            raise ValueError(f"truncation_radius must be positive, got {self.truncation_radius}")

    def with_radius(self, radius: float) -> 'QuadratureSpec':
        return QuadratureSpec(self.abs_tol, self.rel_tol, self.max_subdivisions, radius)


DEFAULT_QUADRATURE = QuadratureSpec()


def _quad_piece(f: Callable[[float], float], a: float, b: float, spec: QuadratureSpec,
                points: Optional[Sequence[float]] = None) -> Tuple[float, float, int]:
    kwargs = dict(epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=spec.max_subdivisions, full_output=1)
    if points:
        kwargs['points'] = list(points)
    result = integrate.quad(f, a, b, **kwargs)
    value, abserr, info = result[0], result[1], result[2]
    subdivisions = int(info.get('last', 0)) if isinstance(info, dict) else 0
    if len(result) > 3:
        target = max(spec.abs_tol, spec.rel_tol * abs(value))
        if not math.isfinite(value) or abserr > target:
            raise QuadratureError(f"quadrature on [{a}, {b}] did not converge: {result[3]}",
                                  value, abserr, subdivisions)
        logging.debug(f"quad on [{a}, {b}] flagged ({result[3]!s:.60}) but error {abserr:.2e} within target")
    return value, abserr, subdivisions


def integrate_adaptive(f: Callable[[float], float], a: float, b: float,
                       spec: QuadratureSpec = DEFAULT_QUADRATURE,
                       points: Optional[Sequence[float]] = None) -> float:
    """
    Integrate f over [a, b] (b may be +inf) to max(abs_tol, rel_tol*|I|).
    Half-infinite ranges are split at a + truncation_radius; the finite piece
    carries the breakpoints, the tail is mapped to a finite interval by quad.
    """
    if not math.isfinite(a):
        raise ValueError(f"lower limit must be finite, got {a}")
    if b == a:
        return 0.0
    if b < a:
        raise ValueError(f"upper limit {b} below lower limit {a}")
    if math.isfinite(b):
        inner = [p for p in (points or ()) if a < p < b]
        value, _, _ = _quad_piece(f, a, b, spec, inner)
        return value

    cut = a + spec.truncation_radius
    inner = [p for p in (points or ()) if a < p < cut]
    head, head_err, head_n = _quad_piece(f, a, cut, spec, inner)
    tail, tail_err, tail_n = _quad_piece(f, cut, math.inf, spec)
    total = head + tail
    error = head_err + tail_err
    if error > max(spec.abs_tol, spec.rel_tol * abs(total)) * 2.0:
        raise QuadratureError("half-infinite quadrature exceeded tolerance", total, error, head_n + tail_n)
    return total


def dft_frequencies(n: int) -> np.ndarray:
    """Integer frequencies -floor(n/2), ..., ceil(n/2)-1 in ascending order"""
    if n < 1:
        raise ValueError("DFT length must be >= 1")
    return np.fft.fftshift(np.fft.fftfreq(n, d=1.0 / n)).round().astype(int)


def dft_forward(values: Sequence[float]) -> np.ndarray:
    """Fourier coefficients c_k = (1/n) sum_j v_j e^{-2 pi i k j / n}, ordered as dft_frequencies(n)"""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("dft_forward needs a non-empty 1-D vector")
    return np.fft.fftshift(np.fft.fft(v)) / v.size


def dft_inverse(coeffs: Sequence[complex]) -> np.ndarray:
    """Inverse of dft_forward; returns the real part"""
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 1 or c.size == 0:
        raise ValueError("dft_inverse needs a non-empty 1-D vector")
    return np.real(np.fft.ifft(np.fft.ifftshift(c) * c.size))


@dataclass(frozen=True)
class GegenbauerEval:
    order_lambda: float
    degree_cap: int

    def __post_init__(self):
        if not self.order_lambda > 0:
            raise ValueError(f"Gegenbauer order must be positive, got {self.order_lambda}")
        if self.degree_cap < 0:
            raise ValueError(f"degree cap must be >= 0, got {self.degree_cap}")

    @classmethod
    def for_sphere(cls, d: int, degree_cap: int) -> 'GegenbauerEval':
        return cls((d - 1) / 2.0, degree_cap)


def gegenbauer_table(ev: GegenbauerEval, x) -> np.ndarray:
    """Rows C_0^lam(x), ..., C_N^lam(x) by the three-term recurrence"""
    xs = np.asarray(x, dtype=float)
    if np.any(np.abs(xs) > 1.0 + 1e-12):
        raise ValueError("Gegenbauer argument must lie in [-1, 1]")
    lam = ev.order_lambda
    table = np.empty((ev.degree_cap + 1,) + xs.shape)
    table[0] = 1.0
    if ev.degree_cap >= 1:
        table[1] = 2.0 * lam * xs
    for n in range(2, ev.degree_cap + 1):
        table[n] = (2.0 * xs * (n + lam - 1.0) * table[n - 1] - (n + 2.0 * lam - 2.0) * table[n - 2]) / n
    return table


def gegenbauer(ev: GegenbauerEval, n: int, x):
    """C_n^lam(x) for 0 <= n <= degree_cap and |x| <= 1"""
    if n < 0 or n > ev.degree_cap:
        raise ValueError(f"degree {n} outside 0..{ev.degree_cap}")
    value = gegenbauer_table(GegenbauerEval(ev.order_lambda, n), x)[n]
    return float(value) if np.ndim(value) == 0 else value


def second_difference(f, i: int) -> float:
    """(f[i+1] - 2 f[i] + f[i-1]) / h^2 on a uniform grid"""
    values = np.asarray(f.values, dtype=float)
    n = values.size
    if not 1 <= i <= n - 2:
        raise ValueError(f"second difference needs an interior index, got {i} for n={n}")
    if not f.domain.uniform:
        raise ValueError("second difference needs a uniform grid")
    h = f.domain.spacing
    return (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h)


def forward_differences(values: np.ndarray, nodes: np.ndarray, period: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Differences and node spacings; a period adds the wrap-around pair"""
    v = np.asarray(values, dtype=float)
    x = np.asarray(nodes, dtype=float)
    dv = np.diff(v)
    dx = np.diff(x)
    if period is not None:
        dv = np.append(dv, v[0] - v[-1])
        dx = np.append(dx, x[0] + period - x[-1])
    return dv, dx


def gauss_legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    if n < 1:
        raise ValueError("Gauss-Legendre rule needs n >= 1")
    return np.polynomial.legendre.leggauss(n)


def golden_section_max(fun: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray,
                       iterations: int = 48) -> Tuple[np.ndarray, np.ndarray]:
    """
    Maximize many independent scalar functions at once. fun receives one
    abscissa per problem and returns one value per problem.
    """
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a = np.asarray(lo, dtype=float).copy()
    b = np.asarray(hi, dtype=float).copy()
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc = fun(c)
    fd = fun(d)
    for _ in range(iterations):
        # left: the maximum lies in [a, d], otherwise in [c, b]
        left = fc >= fd
        a, b = np.where(left, a, c), np.where(left, d, b)
        probe = np.where(left, b - inv_phi * (b - a), a + inv_phi * (b - a))
        fp = fun(probe)
        c, d, fc, fd = (np.where(left, probe, d), np.where(left, c, probe),
                        np.where(left, fp, fd), np.where(left, fc, fp))
    best_left = fc >= fd
    return np.where(best_left, c, d), np.where(best_left, fc, fd)


def segment_slopes_of(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Slopes of the segments of a piecewise-linear function; zero-length segments get slope 0"""
    dx = np.diff(xs)
    return np.divide(np.diff(ys), dx, out=np.zeros_like(dx), where=dx > 0)


def piecewise_linear_max_tracked(xs: np.ndarray, ys: np.ndarray, slopes: np.ndarray, slope: float,
                                 intercept: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    max(F, L) for piecewise-linear F and affine L, with crossings inserted as breakpoints.
    Segment slopes are carried over exactly: each output segment has either a slope of F
    or the slope of L. Gaps within round-off of zero count as touching, not crossing.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    line = slope * xs + intercept
    gap = ys - line
    tiny = 64.0 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(ys))), float(np.max(np.abs(line))))
    gap[np.abs(gap) <= tiny] = 0.0
    left, right = gap[:-1], gap[1:]
    seg = np.where((left <= 0) & (right <= 0), slope, slopes)
    cross = np.flatnonzero(left * right < 0)
    s = np.clip(left[cross] / (left[cross] - right[cross]), 0.0, 1.0)
    xc = xs[cross] + s * (xs[cross + 1] - xs[cross])
    f_first = left[cross] > 0
    seg[cross] = np.where(f_first, slopes[cross], slope)
    out_slopes = np.insert(seg, cross + 1, np.where(f_first, slope, slopes[cross]))
    out_x = np.insert(xs, cross + 1, xc)
    out_y = np.insert(np.maximum(ys, line), cross + 1, slope * xc + intercept)
    return out_x, out_y, out_slopes


def piecewise_linear_max(xs: np.ndarray, ys: np.ndarray, slope: float, intercept: float) -> Tuple[np.ndarray, np.ndarray]:
    """Exact max of a piecewise-linear function and an affine one, crossings inserted as breakpoints"""
    out_x, out_y, _ = piecewise_linear_max_tracked(xs, ys, segment_slopes_of(xs, ys), slope, intercept)
    return out_x, out_y


def slope_norm(slopes: np.ndarray, dx: np.ndarray, p: float) -> float:
    """||F'||_p from segment slopes and lengths"""
    if not (math.isinf(p) or p >= 1):
        raise ValueError(f"p must be >= 1, got {p}")
    keep = dx > 0
    magnitudes = np.abs(slopes[keep])
    if magnitudes.size == 0:
        return 0.0
    if math.isinf(p):
        return float(magnitudes.max())
    return float(np.sum(magnitudes ** p * dx[keep]) ** (1.0 / p))


def piecewise_linear_norm(xs: np.ndarray, ys: np.ndarray, p: float) -> float:
    """||F'||_p of the piecewise-linear F through (xs, ys)"""
    xs = np.asarray(xs, dtype=float)
    return slope_norm(segment_slopes_of(xs, np.asarray(ys, dtype=float)), np.diff(xs), p)


def low_discrepancy(n: int, seed: int, lo: float, hi: float) -> np.ndarray:
    """n scrambled Halton points in the open interval (lo, hi)"""
    sampler = qmc.Halton(d=1, scramble=True, seed=seed)
    u = sampler.random(n).ravel()
    u = np.clip(u, 1e-12, 1.0 - 1e-12)
    return lo + (hi - lo) * u
