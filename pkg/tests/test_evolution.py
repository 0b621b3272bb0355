import math

import numpy as np
import pytest

from maxvar.evolution import (GridFunction, LineDomain, LinePropagator, SpherePropagator, TimeGrid,
                              TorusDomain, TorusPropagator, ZonalSphereDomain, cone_values, evolve_line,
                              evolve_torus, evolve_zonal_sphere, poisson_halfplane, smoothed_datum)
from maxvar.kernels import EllipticParams, SphericalHeat, SphericalPoisson, elliptic_multiplier


def bump(domain, width=0.5):
    return GridFunction(domain, np.exp(-domain.nodes ** 2 / (2.0 * width ** 2)))


class TestDomains:
    def test_line_refinement_keeps_nodes(self, line):
        fine = line.refined()
        assert fine.n == 2 * line.n - 1
        np.testing.assert_allclose(fine.nodes[::2], line.nodes, atol=1e-14)

    def test_torus_nodes(self):
        np.testing.assert_allclose(TorusDomain(4).nodes, [0.0, 0.25, 0.5, 0.75])

    def test_sphere_nodes_ascending(self, sphere):
        assert np.all(np.diff(sphere.nodes) > 0)
        assert sphere.weights.sum() == pytest.approx(2.0, abs=1e-13)
        with pytest.raises(ValueError):
            sphere.spacing

    def test_sphere_needs_two_dimensions(self):
        with pytest.raises(ValueError):
            ZonalSphereDomain(16, d=3)

    def test_grid_function_validation(self, line):
        with pytest.raises(ValueError):
            GridFunction(line, np.zeros(line.n - 1))
        values = np.zeros(line.n)
        values[3] = np.nan
        with pytest.raises(ValueError):
            GridFunction(line, values)

    def test_time_grid(self):
        tg = TimeGrid(0.01, 10.0, 4)
        np.testing.assert_allclose(tg.nodes, [0.01, 0.1, 1.0, 10.0], rtol=1e-12)
        np.testing.assert_allclose(tg.refined().nodes[::2], tg.nodes, rtol=1e-12)
        with pytest.raises(ValueError):
            TimeGrid(0.0, 1.0, 10)
        with pytest.raises(ValueError):
            TimeGrid(0.0, 1.0, 10, 'linear')


class TestLine:
    def test_heat_evolution_of_gaussian(self):
        domain = LineDomain(-8.0, 8.0, 641)
        w, s = 0.5, 0.1
        u = evolve_line(bump(domain, w), EllipticParams(0.0, 1.0), s)
        var = w * w + 2.0 * s
        expected = w / math.sqrt(var) * np.exp(-domain.nodes ** 2 / (2.0 * var))
        np.testing.assert_allclose(u.values, expected, atol=2e-4)

    @pytest.mark.parametrize("params", [EllipticParams(1.0, 0.0), EllipticParams(0.0, 1.0),
                                        EllipticParams(1.0, 1.0)])
    def test_maximum_principle(self, line, params):
        u0 = bump(line)
        u = evolve_line(u0, params, 0.3)
        assert np.all(u.values >= 0.0)
        assert u.values.max() <= u0.values.max() + 1e-10

    def test_uses_absolute_value(self, line):
        u0 = bump(line)
        params = EllipticParams(1.0, 0.0)
        np.testing.assert_allclose(evolve_line(u0.with_values(-u0.values), params, 0.5).values,
                                   evolve_line(u0, params, 0.5).values, atol=1e-15)

    def test_pointwise_matches_grid_evaluation(self, line):
        u0 = bump(line)
        for params in (EllipticParams(1.0, 0.0), EllipticParams(1.0, 1.0)):
            propagator = LinePropagator(u0, params, (0.05, 5.0))
            grid = propagator.evolve_many([0.7])[0]
            pointwise = propagator.evaluate(np.full(line.n, 0.7))
            np.testing.assert_allclose(pointwise, grid, atol=1e-12)

    def test_times_outside_range_rejected(self, line):
        propagator = LinePropagator(bump(line), EllipticParams(1.0, 0.0), (0.1, 1.0))
        with pytest.raises(ValueError):
            propagator.evolve_many([2.0])

    def test_off_grid_mixture_rejected(self, line):
        propagator = LinePropagator(bump(line), EllipticParams(1.0, 1.0), (0.1, 1.0))
        with pytest.raises(ValueError):
            propagator.evolve_many([0.5], offset=0.01)

    def test_halfplane_value_matches_centred_evolution(self, line):
        u0 = bump(line)
        u = evolve_line(u0, EllipticParams(1.0, 0.0), 0.4)
        assert poisson_halfplane(u0, line.nodes[80], 0.4) == pytest.approx(u.values[80], abs=1e-12)

    def test_cone_centre_is_the_centred_evolution(self, line):
        u0 = bump(line)
        ts = np.array([0.1, 1.0])
        cone = cone_values(u0, ts, 1.0, 4)
        assert cone.shape == (2, 9, line.n)
        for k, t in enumerate(ts):
            np.testing.assert_allclose(cone[k, 4], evolve_line(u0, EllipticParams(1.0, 0.0), t).values,
                                       atol=1e-12)

    def test_cone_needs_a_line(self, torus):
        with pytest.raises(ValueError):
            cone_values(GridFunction(torus, np.ones(torus.n)), [0.1], 1.0, 4)


class TestTorus:
    def test_trigonometric_single_mode(self, torus):
        x = torus.nodes
        u0 = GridFunction(torus, 1.0 + np.cos(2.0 * math.pi * x))
        params = EllipticParams(1.0, 1.0)
        u = evolve_torus(u0, params, 0.2)
        expected = 1.0 + elliptic_multiplier(params, 0.2, 1.0) * np.cos(2.0 * math.pi * x)
        np.testing.assert_allclose(u.values, expected, atol=1e-12)

    def test_linear_interpolant_preserves_mean(self, torus):
        rng = np.random.default_rng(1)
        u0 = GridFunction(torus, rng.uniform(0.0, 1.0, torus.n))
        values = TorusPropagator(u0, EllipticParams(2.0, 0.5)).evolve_many([0.01, 0.1, 1.0])
        np.testing.assert_allclose(values.mean(axis=1), u0.values.mean(), atol=1e-12)

    def test_constant_datum_is_stationary(self, torus):
        u0 = GridFunction(torus, np.full(torus.n, 2.0))
        for interpolant in ('linear', 'trigonometric'):
            np.testing.assert_allclose(evolve_torus(u0, EllipticParams(1.0, 0.0), 0.3, interpolant).values,
                                       2.0, atol=1e-12)

    def test_pointwise_matches_grid_evaluation(self, torus):
        u0 = GridFunction(torus, np.abs(np.sin(3.0 * math.pi * torus.nodes)))
        propagator = TorusPropagator(u0, EllipticParams(1.0, 1.0))
        np.testing.assert_allclose(propagator.evaluate(np.full(torus.n, 0.05)),
                                   propagator.evolve_many([0.05])[0], atol=1e-12)

    def test_unknown_interpolant(self, torus):
        with pytest.raises(ValueError):
            TorusPropagator(GridFunction(torus, np.ones(torus.n)), EllipticParams(1.0, 1.0), 'cubic')


class TestSphere:
    def test_poisson_keeps_constants(self, sphere):
        u0 = GridFunction(sphere, np.ones(sphere.n))
        u = evolve_zonal_sphere(u0, SphericalPoisson(), 0.5)
        np.testing.assert_allclose(u.values, 1.0, atol=1e-8)

    def test_heat_keeps_constants(self, sphere):
        u0 = GridFunction(sphere, np.ones(sphere.n))
        u = evolve_zonal_sphere(u0, SphericalHeat(), 0.1)
        np.testing.assert_allclose(u.values, 1.0, atol=1e-10)

    def test_heat_single_mode(self, sphere):
        u0 = GridFunction(sphere, 1.0 + sphere.cosines)
        u = evolve_zonal_sphere(u0, SphericalHeat(), 0.2)
        np.testing.assert_allclose(u.values, 1.0 + math.exp(-0.4) * sphere.cosines, atol=1e-10)

    def test_poisson_single_mode(self, sphere):
        u0 = GridFunction(sphere, 1.0 + sphere.cosines)
        u = evolve_zonal_sphere(u0, SphericalPoisson(), 0.5)
        np.testing.assert_allclose(u.values, 1.0 + 0.5 * sphere.cosines, atol=1e-8)

    def test_pointwise_matches_grid_evaluation(self, sphere):
        u0 = GridFunction(sphere, 1.0 + sphere.cosines ** 3)
        for family, param in ((SphericalPoisson(), 0.4), (SphericalHeat(), 0.3)):
            propagator = SpherePropagator(u0, family, (0.3, 1.0), 64)
            np.testing.assert_allclose(propagator.evaluate(np.full(sphere.n, param)),
                                       propagator.evolve_many([param])[0], atol=1e-12)

    def test_rho_range(self, sphere):
        propagator = SpherePropagator(GridFunction(sphere, np.ones(sphere.n)), SphericalPoisson())
        with pytest.raises(ValueError):
            propagator.evolve_many([1.0])

    def test_heat_needs_time_range(self, sphere):
        with pytest.raises(ValueError):
            SpherePropagator(GridFunction(sphere, np.ones(sphere.n)), SphericalHeat())


def test_smoothed_datum(line, sphere):
    u0 = bump(line)
    np.testing.assert_allclose(smoothed_datum(u0, EllipticParams(1.0, 1.0), 0.1).values,
                               evolve_line(u0, EllipticParams(1.0, 1.0), 0.1).values, atol=1e-14)
    with pytest.raises(ValueError):
        smoothed_datum(GridFunction(sphere, np.ones(sphere.n)), EllipticParams(1.0, 1.0), 0.1)
