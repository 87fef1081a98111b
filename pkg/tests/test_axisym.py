"""Axisymmetric fundamental model and its self-similar solution."""

import numpy as np
import pytest

from eulerlab.axisym import (
    L12Kernel,
    PolarField,
    evolve_fundamental,
    evolve_radial,
    fit_blowup_time,
    l12,
    local_rate,
    profile_residual,
    self_similar_solution,
    weno5_derivative,
)
from eulerlab.radial import Profile1D, RadialGrid


@pytest.fixture(scope="module")
def grid():
    return RadialGrid("algebraic", 128)


class TestRadialGrid:
    def test_tail_integral_of_rational(self, grid):
        # int_R^inf 1/(1+s)^2 ds = 1/(1+R)
        F = Profile1D.from_function(grid, lambda R: R / (1 + R) ** 2)
        L = local_rate(F.values, grid)
        fin = np.isfinite(grid.z)
        assert np.max(np.abs(L[fin] - 1 / (1 + grid.z[fin]))) < 1e-12

    def test_last_node_is_infinity(self, grid):
        assert np.isinf(grid.z[-1]) and grid.z[0] == 0.0


class TestL12:
    def test_kernel_integrates_to_one(self):
        k = L12Kernel(25)
        assert np.isclose(k.kernel_weights.sum(), 1.0, atol=1e-12)

    def test_radial_field_reduces_to_local_rate(self, grid):
        F = Profile1D.from_function(grid, lambda R: R / (1 + R) ** 2)
        L = l12(PolarField.radial(F, 25))
        assert np.allclose(L.values, local_rate(F.values, grid), atol=1e-13)

    def test_non_decaying_tail_rejected(self, grid):
        with pytest.raises(ValueError):
            l12(PolarField.radial(Profile1D(grid, np.ones(grid.size)), 25))


class TestSelfSimilar:
    def test_profile_equations(self, grid):
        assert profile_residual(Profile1D.from_function(grid, lambda R: 1 / (1 + R)), None) < 1e-12
        assert profile_residual(Profile1D.from_function(grid, lambda R: R / (1 + R) ** 2), 2.0) < 1e-12

    def test_radial_run_tracks_exact_solution(self, grid):
        h = evolve_radial(self_similar_solution(grid, 0.0), 1e-3, 0.5, snapshot_every=25)
        ex = self_similar_solution(grid, h.times[-1]).values
        assert np.max(np.abs(h.profiles[-1].values - ex)) < 1e-8

    def test_polar_run_keeps_radial_data_radial(self, grid):
        w0 = PolarField.radial(self_similar_solution(grid, 0.0), 13)
        h = evolve_fundamental(w0, 1e-3, 0.3, snapshot_every=50)
        last = h.snapshots[-1]
        ex = self_similar_solution(grid, h.times[-1]).values
        assert np.max(np.abs(last.values - ex[:, None])) < 1e-6

    def test_blowup_time_fit(self):
        t = np.linspace(0, 0.999, 200)
        assert abs(fit_blowup_time(t, 2 / (1 - t)) - 1.0) < 1e-10
        assert fit_blowup_time(t, np.ones_like(t)) is None


class TestWeno:
    def test_smooth_derivative(self):
        th = np.linspace(0, np.pi / 2, 97)
        f = np.sin(3 * th)[None, :]
        d = weno5_derivative(f, th[1] - th[0], np.ones_like(f))
        assert np.max(np.abs(d - 3 * np.cos(3 * th))) < 1e-5


class TestPolarSnapshot:
    def test_round_trip(self, grid, tmp_path):
        w = PolarField.from_function(grid, 7, lambda R, th: R / (1 + R) ** 2 * np.cos(th))
        w.write(tmp_path / "w.pol")
        back = PolarField.read(tmp_path / "w.pol", grid)
        assert np.array_equal(back.values, w.values)
