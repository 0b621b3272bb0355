import math

import numpy as np
import pytest
from scipy import special

from maxvar.evolution import GridFunction, LineDomain, TorusDomain
from maxvar.numerics import (DEFAULT_QUADRATURE, GegenbauerEval, QuadratureError, QuadratureSpec,
                             dft_forward, dft_frequencies, dft_inverse, forward_differences,
                             gegenbauer, gegenbauer_table, golden_section_max, integrate_adaptive,
                             low_discrepancy, piecewise_linear_max, piecewise_linear_max_tracked,
                             piecewise_linear_norm, second_difference, segment_slopes_of, slope_norm)


class TestQuadrature:
    def test_finite_interval(self):
        assert integrate_adaptive(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-10)

    def test_half_infinite_interval(self):
        value = integrate_adaptive(lambda x: math.exp(-x), 0.0, math.inf)
        assert value == pytest.approx(1.0, abs=1e-10)

    def test_half_infinite_with_breakpoints_past_the_cut(self):
        spec = DEFAULT_QUADRATURE.with_radius(5.0)
        value = integrate_adaptive(lambda x: 1.0 / (1.0 + x * x), 0.0, math.inf, spec, [1.0, 10.0])
        assert value == pytest.approx(math.pi / 2.0, abs=1e-9)

    def test_empty_interval(self):
        assert integrate_adaptive(math.exp, 1.0, 1.0) == 0.0

    def test_reversed_limits_rejected(self):
        with pytest.raises(ValueError):
            integrate_adaptive(math.exp, 1.0, 0.0)

    def test_divergent_integral_raises(self):
        spec = QuadratureSpec(max_subdivisions=5)
        with pytest.raises(QuadratureError) as info:
            integrate_adaptive(lambda x: 1.0 / math.sqrt(abs(math.sin(50.0 * x)) + 1e-300), 0.0, 10.0, spec)
        assert info.value.subdivisions >= 0

    @pytest.mark.parametrize("field,value", [("abs_tol", 0.0), ("rel_tol", -1.0), ("max_subdivisions", 0),
                                             ("truncation_radius", 0.0)])
    def test_spec_validation(self, field, value):
        with pytest.raises(ValueError):
            QuadratureSpec(**{field: value})


class TestDFT:
    def test_frequency_order(self):
        assert dft_frequencies(4).tolist() == [-2, -1, 0, 1]
        assert dft_frequencies(5).tolist() == [-2, -1, 0, 1, 2]

    def test_single_mode_coefficients(self):
        n = 16
        x = np.arange(n) / n
        c = dft_forward(np.cos(2.0 * math.pi * x))
        freqs = dft_frequencies(n)
        assert c[freqs == 1][0] == pytest.approx(0.5, abs=1e-14)
        assert c[freqs == -1][0] == pytest.approx(0.5, abs=1e-14)
        assert abs(c[freqs == 0][0]) < 1e-14

    def test_inverse_recovers_samples(self):
        values = np.random.default_rng(3).uniform(size=33)
        np.testing.assert_allclose(dft_inverse(dft_forward(values)), values, atol=1e-13)

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            dft_forward([])


class TestGegenbauer:
    def test_legendre_values(self):
        ev = GegenbauerEval.for_sphere(2, 3)
        x = 0.3
        assert gegenbauer(ev, 2, x) == pytest.approx(0.5 * (3 * x * x - 1), abs=1e-14)
        assert gegenbauer(ev, 3, x) == pytest.approx(0.5 * (5 * x ** 3 - 3 * x), abs=1e-14)

    def test_value_at_one(self):
        ev = GegenbauerEval(1.5, 10)
        table = gegenbauer_table(ev, 1.0)
        n = np.arange(11)
        expected = [math.comb(k + 2, k) for k in n]
        np.testing.assert_allclose(table, expected, rtol=1e-12)

    @pytest.mark.parametrize("lam", [0.5, 1.0, 1.5, 2.0])
    def test_matches_scipy(self, lam):
        x = np.linspace(-1.0, 1.0, 21)
        table = gegenbauer_table(GegenbauerEval(lam, 12), x)
        for n in range(13):
            np.testing.assert_allclose(table[n], special.eval_gegenbauer(n, lam, x), rtol=1e-11, atol=1e-11)

    @pytest.mark.parametrize("lam", [0.5, 1.0, 1.5, 2.0])
    def test_generating_function(self, lam):
        x = np.linspace(-1.0, 1.0, 21)
        r = 0.1
        table = gegenbauer_table(GegenbauerEval(lam, 12), x)
        series = np.sum(table * r ** np.arange(13)[:, None], axis=0)
        np.testing.assert_allclose(series, (1.0 - 2.0 * x * r + r * r) ** (-lam), atol=1e-9)

    def test_argument_range(self):
        with pytest.raises(ValueError):
            gegenbauer_table(GegenbauerEval(0.5, 2), 1.5)

    def test_degree_range(self):
        with pytest.raises(ValueError):
            gegenbauer(GegenbauerEval(0.5, 2), 3, 0.0)

    def test_order_must_be_positive(self):
        with pytest.raises(ValueError):
            GegenbauerEval(0.0, 2)


class TestDifferences:
    def test_second_difference_of_parabola(self):
        domain = LineDomain(0.0, 1.0, 11)
        f = GridFunction(domain, domain.nodes ** 2)
        assert second_difference(f, 5) == pytest.approx(2.0, rel=1e-10)

    def test_second_difference_needs_interior_index(self):
        domain = LineDomain(0.0, 1.0, 11)
        f = GridFunction(domain, domain.nodes)
        with pytest.raises(ValueError):
            second_difference(f, 0)

    def test_periodic_differences_wrap(self):
        domain = TorusDomain(4)
        dv, dx = forward_differences(np.array([0.0, 1.0, 2.0, 3.0]), domain.nodes, 1.0)
        assert dv.tolist() == [1.0, 1.0, 1.0, -3.0]
        np.testing.assert_allclose(dx, 0.25)


class TestOptimisation:
    def test_golden_section_finds_many_maxima(self):
        centres = np.array([0.2, 0.5, 0.9])
        arg, value = golden_section_max(lambda s: -(s - centres) ** 2, np.zeros(3), np.ones(3))
        np.testing.assert_allclose(arg, centres, atol=1e-8)
        np.testing.assert_allclose(value, 0.0, atol=1e-14)

    def test_piecewise_linear_max_inserts_crossings(self):
        xs = np.array([0.0, 1.0, 2.0])
        ys = np.array([0.0, 1.0, 0.0])
        out_x, out_y = piecewise_linear_max(xs, ys, 0.0, 0.5)
        np.testing.assert_allclose(out_x, [0.0, 0.5, 1.0, 1.5, 2.0])
        np.testing.assert_allclose(out_y, [0.5, 0.5, 1.0, 0.5, 0.5])

    def test_touching_line_adds_no_sliver(self):
        xs = np.array([0.0, 1.0, 2.0])
        ys = np.array([0.0, 1.0, 0.0])
        out_x, out_y, slopes = piecewise_linear_max_tracked(xs, ys, segment_slopes_of(xs, ys), 1.0 + 2e-16, -1e-16)
        assert out_x.size == 3
        np.testing.assert_allclose(slopes, [1.0, 1.0])

    def test_tracked_slopes_are_exact(self):
        xs = np.array([0.0, 1.0, 2.0])
        ys = np.array([0.0, 1.0, 0.0])
        _, _, slopes = piecewise_linear_max_tracked(xs, ys, segment_slopes_of(xs, ys), 0.0, 0.5)
        np.testing.assert_array_equal(slopes, [0.0, 1.0, -1.0, 0.0])
        assert slope_norm(slopes, np.array([0.5, 0.5, 0.5, 0.5]), math.inf) == 1.0

    def test_piecewise_linear_norm(self):
        xs = np.linspace(0.0, 1.0, 1001)
        assert piecewise_linear_norm(xs, xs ** 2, 2.0) == pytest.approx(2.0 / math.sqrt(3.0), abs=1e-6)
        assert piecewise_linear_norm(xs, xs ** 2, math.inf) == pytest.approx(2.0, abs=2e-3)
        assert piecewise_linear_norm(xs, xs ** 2, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_low_discrepancy_is_seeded_and_inside(self):
        a = low_discrepancy(50, 4, -1.0, 2.0)
        b = low_discrepancy(50, 4, -1.0, 2.0)
        np.testing.assert_array_equal(a, b)
        assert np.all((a > -1.0) & (a < 2.0))
