import math

import numpy as np
import pytest

from maxvar.datum import (DatumError, DatumSpec, datum_from_frame, generate_datum, piecewise_linear_knots,
                          read_datum_csv, segment_slopes)
from maxvar.evolution import LineDomain, TorusDomain, ZonalSphereDomain


class TestGenerators:
    def test_piecewise_linear_line(self, line):
        u0 = generate_datum(DatumSpec('piecewise_linear', line, seed=5))
        assert u0.values[0] == 0.0 and u0.values[-1] == 0.0
        assert np.all((u0.values >= 0.0) & (u0.values <= 1.0))

    def test_seeded(self, line):
        a = generate_datum(DatumSpec('step', line, seed=11))
        b = generate_datum(DatumSpec('step', line, seed=11))
        c = generate_datum(DatumSpec('step', line, seed=12))
        np.testing.assert_array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)

    def test_refined_grid_reproduces_the_function(self, line):
        spec = DatumSpec('piecewise_linear', line, seed=9)
        coarse = generate_datum(spec)
        fine = generate_datum(spec, line.refined())
        np.testing.assert_allclose(fine.values[::2], coarse.values, atol=1e-14)

    def test_knot_slopes(self, line):
        spec = DatumSpec('piecewise_linear', line, seed=4, segments=6)
        kx, ky = piecewise_linear_knots(spec)
        assert kx.size == 7
        np.testing.assert_allclose(segment_slopes(spec), np.diff(ky) / np.diff(kx))

    def test_torus_piecewise_linear_is_periodic(self, torus):
        spec = DatumSpec('piecewise_linear', torus, seed=2)
        assert segment_slopes(spec).size == spec.segments
        u0 = generate_datum(spec)
        kx, ky = piecewise_linear_knots(spec)
        np.testing.assert_allclose(u0.values, np.interp(torus.nodes, kx, ky, period=1.0))

    def test_step_levels(self, line):
        u0 = generate_datum(DatumSpec('step', line, seed=1, jumps=3))
        assert u0.values[0] == 0.0 and u0.values[-1] == 0.0
        assert np.unique(u0.values).size <= 4

    def test_single_mode(self, torus, sphere):
        np.testing.assert_allclose(generate_datum(DatumSpec('single_mode', torus)).values,
                                   1.0 + np.cos(2.0 * math.pi * torus.nodes))
        np.testing.assert_allclose(generate_datum(DatumSpec('single_mode', sphere)).values, 1.0 + sphere.cosines)
        with pytest.raises(ValueError):
            generate_datum(DatumSpec('single_mode', LineDomain(-1.0, 1.0, 33)))

    def test_bump_wraps_on_the_torus(self, torus):
        u0 = generate_datum(DatumSpec('gaussian_bump', torus, center=0.0, width=0.1))
        assert u0.values[1] == pytest.approx(u0.values[-1], rel=1e-12)

    @pytest.mark.parametrize("kwargs", [dict(generator='nope'), dict(generator='piecewise_linear', segments=1),
                                        dict(generator='step', jumps=1), dict(generator='gaussian_bump', width=0.0),
                                        dict(generator='custom_csv')])
    def test_invalid_specs(self, line, kwargs):
        with pytest.raises(ValueError):
            DatumSpec(domain=line, **kwargs)


class TestCSV:
    def write(self, tmp_path, text):
        path = tmp_path / "datum.csv"
        path.write_text(text)
        return str(path)

    def test_line_grid_from_file(self, tmp_path):
        rows = "\n".join(f"{x:.3f},{abs(x):.3f}" for x in np.linspace(-1.0, 1.0, 9))
        path = self.write(tmp_path, "x,value\n" + rows + "\n")
        u0 = generate_datum(DatumSpec('custom_csv', LineDomain(-4.0, 4.0, 161), path=path))
        assert isinstance(u0.domain, LineDomain)
        assert (u0.domain.x_min, u0.domain.x_max, u0.n) == (-1.0, 1.0, 9)
        np.testing.assert_allclose(u0.values, np.abs(np.linspace(-1.0, 1.0, 9)))

    def test_bad_header(self, tmp_path):
        path = self.write(tmp_path, "pos,value\n0,1\n1,2\n2,3\n")
        with pytest.raises(DatumError, match="header"):
            read_datum_csv(path)

    def test_non_numeric_row_is_named(self, tmp_path):
        path = self.write(tmp_path, "x,value\n0,1\n1,abc\n2,3\n")
        with pytest.raises(DatumError, match="row 2"):
            read_datum_csv(path)

    def test_x_must_increase(self, tmp_path):
        path = self.write(tmp_path, "x,value\n0,1\n2,1\n1,1\n")
        with pytest.raises(DatumError, match="row 3"):
            read_datum_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_datum_csv(str(tmp_path / "absent.csv"))

    def test_non_uniform_line_rejected(self, tmp_path):
        path = self.write(tmp_path, "x,value\n0,1\n1,1\n3,1\n")
        with pytest.raises(DatumError, match="uniform"):
            datum_from_frame(read_datum_csv(path), LineDomain(0.0, 3.0, 4))

    def test_torus_file(self, tmp_path):
        rows = "\n".join(f"{j / 8},{j}" for j in range(8))
        frame = read_datum_csv(self.write(tmp_path, "x,value\n" + rows + "\n"))
        u0 = datum_from_frame(frame, TorusDomain(64))
        assert u0.domain == TorusDomain(8)
        bad = frame.assign(x=frame['x'] + 0.01)
        with pytest.raises(DatumError):
            datum_from_frame(bad, TorusDomain(8))

    def test_sphere_file_is_interpolated(self, tmp_path):
        theta = np.linspace(0.0, math.pi, 50)
        rows = "\n".join(f"{t:.17g},{math.cos(t):.17g}" for t in theta)
        frame = read_datum_csv(self.write(tmp_path, "x,value\n" + rows + "\n"))
        domain = ZonalSphereDomain(16)
        u0 = datum_from_frame(frame, domain)
        np.testing.assert_allclose(u0.values, domain.cosines, atol=2e-3)
