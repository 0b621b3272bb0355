import math

import numpy as np
import pytest

from maxvar.evolution import GridFunction, LineDomain, TorusDomain, ZonalSphereDomain
from maxvar.variation import SUPPORTED_P, grad_lp_norm, lipschitz_constant, total_variation, variation_report


def test_torus_single_mode_variation():
    domain = TorusDomain(64)
    f = GridFunction(domain, 1.0 + np.cos(2.0 * math.pi * domain.nodes))
    assert total_variation(f) == pytest.approx(4.0, abs=1e-12)


def test_line_variation_has_no_wrap():
    f = GridFunction(LineDomain(0.0, 1.0, 3), [0.0, 1.0, 0.5])
    assert total_variation(f) == pytest.approx(1.5)


def test_linear_function_norms():
    domain = LineDomain(0.0, 1.0, 11)
    f = GridFunction(domain, 2.0 * domain.nodes)
    assert grad_lp_norm(f, 1) == pytest.approx(2.0)
    assert grad_lp_norm(f, 2) == pytest.approx(2.0)
    assert grad_lp_norm(f, math.inf) == pytest.approx(2.0)
    assert lipschitz_constant(f) == pytest.approx(2.0)


def test_unsupported_exponent():
    f = GridFunction(LineDomain(0.0, 1.0, 5), np.zeros(5))
    with pytest.raises(ValueError):
        grad_lp_norm(f, 3)


def test_sphere_norm_carries_surface_weight():
    domain = ZonalSphereDomain(64)
    f = GridFunction(domain, 1.0 + domain.cosines)
    # |d/dtheta cos theta|^2 integrated against 2 pi sin theta over (0, pi) is 8 pi / 3
    assert grad_lp_norm(f, 2) == pytest.approx(math.sqrt(8.0 * math.pi / 3.0), rel=1e-2)


def test_sphere_p1_norm_is_total_variation():
    domain = ZonalSphereDomain(64)
    f = GridFunction(domain, np.cos(2.0 * domain.nodes))
    assert grad_lp_norm(f, 1) == pytest.approx(total_variation(f), rel=1e-14)
    assert total_variation(f) == pytest.approx(4.0, rel=1e-2)


def test_report():
    domain = TorusDomain(32)
    f = GridFunction(domain, np.sin(2.0 * math.pi * domain.nodes))
    report = variation_report(f)
    assert set(report.grad_norm_p) == set(SUPPORTED_P)
    assert report.lipschitz == report.grad_norm_p[math.inf]
    assert report.total_variation == pytest.approx(total_variation(f))
