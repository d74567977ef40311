"""fCIR construction, integral sums, and the SDE residual ladder."""

import io

import numpy as np
import pytest

from fcir_lab.errors import DomainError, GridMismatch, HurstTooSmall
from fcir_lab.fbm import SamplePath, Seed, TimeGrid, circulant_fbm
from fcir_lab.fcir import (
    rs_left_sum,
    sde_residual,
    simulate_fcir,
    stratonovich_sum,
)
from fcir_lab.fou import FouPath, ModelParams, simulate_fou
from fcir_lab.validation import expansion_identity_gap


def fou_from_values(t_max, values, y0=None):
    values = np.asarray(values, dtype=float)
    grid = TimeGrid(t_max, len(values) - 1)
    p = ModelParams(H=0.5, a=0.0, sigma=1.0, y0=y0 if y0 is not None else values[0])
    return FouPath(grid, values, p)


class TestSimulateFcir:
    def test_all_positive_squares(self):
        y = fou_from_values(1.0, [1.0, 0.5, 2.0])
        x = simulate_fcir(y)
        assert np.array_equal(x.values, [1.0, 0.25, 4.0])
        assert not x.tau.hit

    def test_absorbed_after_first_crossing(self):
        y = fou_from_values(3.0, [1.0, 0.5, -0.5, 0.3])
        x = simulate_fcir(y)
        assert np.array_equal(x.values, [1.0, 0.25, 0.0, 0.0])
        assert x.tau.hit and x.tau.index == 2

    def test_start_is_squared_start(self):
        y = fou_from_values(1.0, [1.3, 1.1, 0.9])
        x = simulate_fcir(y)
        assert x.values[0] == 1.3**2

    def test_nonnegative_everywhere(self):
        grid = TimeGrid(2.0, 512)
        params = ModelParams(H=0.3, a=-1.0, sigma=1.0, y0=0.3)
        path = circulant_fbm(grid, 0.3, Seed(17))
        x = simulate_fcir(simulate_fou(path, params))
        assert (x.values >= 0.0).all()

    def test_csv_export(self):
        x = simulate_fcir(fou_from_values(1.0, [1.0, 0.5, 2.0]))
        buf = io.StringIO()
        x.write_csv(buf)
        assert buf.getvalue().splitlines()[0] == "t,X"


class TestIntegralSums:
    @pytest.mark.parametrize("H,n", [(0.3, 256), (0.5, 1024), (0.75, 512)])
    def test_midpoint_telescoping_identity(self, H, n):
        path = circulant_fbm(TimeGrid(1.0, n), H, Seed(23))
        got = stratonovich_sum(path, path)
        ref = 0.5 * (path.values[-1] ** 2 - path.values[0] ** 2)
        assert got == pytest.approx(ref, rel=1e-10, abs=1e-13)

    def test_constant_integrand(self):
        grid = TimeGrid(1.0, 64)
        g = circulant_fbm(grid, 0.5, Seed(2))
        c = SamplePath(grid, np.full(65, 2.5))
        expected = 2.5 * (g.values[-1] - g.values[0])
        assert stratonovich_sum(c, g) == pytest.approx(expected, rel=1e-12)
        assert rs_left_sum(c, g) == pytest.approx(expected, rel=1e-12)

    def test_linear_integrator_gives_trapezoid(self):
        grid = TimeGrid(2.0, 128)
        f = SamplePath(grid, np.sin(grid.times))
        g = SamplePath(grid, grid.times.copy())
        assert stratonovich_sum(f, g) == pytest.approx(
            np.trapezoid(f.values, dx=grid.dt), rel=1e-12
        )

    def test_left_sum_quadratic_variation_identity(self):
        path = circulant_fbm(TimeGrid(1.0, 512), 0.4, Seed(3))
        b = path.values
        left = rs_left_sum(path, path)
        ref = 0.5 * (b[-1] ** 2 - b[0] ** 2) - 0.5 * np.sum(np.diff(b) ** 2)
        assert left == pytest.approx(ref, rel=1e-10)

    def test_constant_integrator_gives_zero(self):
        grid = TimeGrid(1.0, 32)
        f = circulant_fbm(grid, 0.5, Seed(9))
        g = SamplePath(grid, np.full(33, 7.0))
        assert rs_left_sum(f, g) == 0.0

    def test_grid_mismatch(self):
        f = SamplePath(TimeGrid(1.0, 4), np.zeros(5))
        g = SamplePath(TimeGrid(1.0, 8), np.zeros(9))
        with pytest.raises(GridMismatch):
            stratonovich_sum(f, g)
        with pytest.raises(GridMismatch):
            rs_left_sum(f, g)


class TestExpansionIdentity:
    @pytest.mark.parametrize("H", [0.3, 0.75])
    def test_six_term_expansion_telescopes(self, H):
        params = ModelParams(H=H, a=-0.5, sigma=0.5, y0=2.0)
        path = circulant_fbm(TimeGrid(1.0, 2048), H, Seed(41))
        assert expansion_identity_gap(path, params) <= 1e-10

    def test_node_increments_telescope(self):
        path = circulant_fbm(TimeGrid(1.0, 256), 0.5, Seed(13))
        params = ModelParams(H=0.5, a=-0.5, sigma=0.5, y0=2.0)
        x = simulate_fcir(simulate_fou(path, params)).values
        assert np.sum(np.diff(x)) == pytest.approx(x[-1] - x[0], rel=1e-12)


class TestSdeResidual:
    @pytest.fixture
    def quiet_params(self):
        return ModelParams(H=0.5, a=-0.5, sigma=0.5, y0=2.0)

    def test_zero_noise_reduces_to_trapezoid_error(self):
        # no noise: X = x0 e^{a~ t} and the residual is a pure integration
        # error, shrinking ~4x per halving
        grid = TimeGrid(1.0, 2**12)
        params = ModelParams(H=0.5, a=1.0, sigma=1.0, y0=1.0)
        flat = SamplePath(grid, np.zeros(grid.n_steps + 1))
        report = sde_residual(flat, params, coarsest_n=256)
        assert (np.diff(report.max_residuals) < 0.0).all()
        assert report.rates[1:] == pytest.approx(2.0, abs=0.1)

    def test_initial_node_residual_is_zero(self, quiet_params):
        # R(t_0) = X_0 - X_0 - empty sums = 0 by construction; the sup over
        # a constant path (no noise, a=0 drift removed by a~ trapezoid being
        # exact for constants) is exactly 0
        grid = TimeGrid(1.0, 512)
        flat = SamplePath(grid, np.zeros(grid.n_steps + 1))
        params = ModelParams(H=0.5, a=0.0, sigma=1.0, y0=1.0)
        report = sde_residual(flat, params, coarsest_n=256)
        assert (report.max_residuals == 0.0).all()

    @pytest.mark.parametrize("H", [0.3, 0.5, 0.75])
    def test_residual_decreases_for_random_paths(self, H, quiet_params):
        params = ModelParams(H=H, a=quiet_params.a, sigma=quiet_params.sigma,
                             y0=quiet_params.y0)
        path = circulant_fbm(TimeGrid(1.0, 2**12), H, Seed(2024))
        report = sde_residual(path, params, coarsest_n=256)
        assert (np.diff(report.max_residuals) < 0.0).all()

    def test_left_sum_variant_converges_above_two_thirds(self, quiet_params):
        params = ModelParams(H=0.75, a=quiet_params.a, sigma=quiet_params.sigma,
                             y0=quiet_params.y0)
        path = circulant_fbm(TimeGrid(1.0, 2**12), 0.75, Seed(2024))
        report = sde_residual(path, params, integral_kind="riemann_stieltjes",
                              coarsest_n=256)
        assert (np.diff(report.max_residuals) < 0.0).all()

    def test_left_sum_variant_needs_large_hurst(self, quiet_params):
        path = circulant_fbm(TimeGrid(1.0, 512), 0.5, Seed(1))
        with pytest.raises(HurstTooSmall):
            sde_residual(path, quiet_params, integral_kind="riemann_stieltjes")

    def test_ladder_validation(self, quiet_params):
        path = circulant_fbm(TimeGrid(1.0, 512), 0.5, Seed(1))
        with pytest.raises(DomainError):
            sde_residual(path, quiet_params, coarsest_n=1024)
        bad = circulant_fbm(TimeGrid(1.0, 768), 0.5, Seed(1))
        with pytest.raises(DomainError):
            sde_residual(bad, quiet_params, coarsest_n=256)

    def test_report_csv(self, quiet_params):
        path = circulant_fbm(TimeGrid(1.0, 1024), 0.5, Seed(4))
        report = sde_residual(path, quiet_params, coarsest_n=256)
        buf = io.StringIO()
        report.write_csv(buf, comment="# head")
        lines = buf.getvalue().splitlines()
        assert lines[1] == "n_steps,delta,max_residual,rate"
        assert lines[2].startswith("256,") and lines[2].endswith(",")
        assert len(lines) == 2 + len(report.n_steps)
