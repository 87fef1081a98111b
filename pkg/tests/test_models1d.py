"""1D vorticity models, Burgers and scale-invariant Euler."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eulerlab.models1d import (
    VARIANT_METADATA,
    CircleField,
    Variant,
    burgers_1d,
    calpha_data,
    characteristic_lp,
    closure,
    evolve_1d,
    hilbert,
    lambda_oracle,
    p1_coefficient,
    scale_invariant_euler,
    sie_stream,
    transported,
    trig_interpolate,
)
from eulerlab.models1d.burgers import characteristic_max_slope


def grid(n=128):
    return CircleField.from_function(n, lambda x: x).values


class TestSpectralPieces:
    @settings(max_examples=20, deadline=None)
    @given(st.integers(1, 20))
    def test_hilbert_of_modes(self, k):
        x = grid()
        assert np.allclose(hilbert(np.cos(k * x)), np.sin(k * x), atol=1e-12)
        assert np.allclose(hilbert(np.sin(k * x)), -np.cos(k * x), atol=1e-12)

    def test_p1_coefficient(self):
        x = grid()
        assert np.isclose(p1_coefficient(3 * np.sin(x) + np.cos(x) + np.sin(2 * x)), 3.0)

    def test_trig_interpolate_off_grid(self):
        x = grid(32)
        pts = np.array([0.123, 1.7, 5.5])
        f = np.sin(3 * x) + np.cos(x)
        assert np.allclose(trig_interpolate(f, pts), np.sin(3 * pts) + np.cos(pts), atol=1e-13)

    def test_projection_closures(self):
        x = grid(64)
        w = 2 * np.sin(x)
        u, ux = closure(w, Variant.PROJECTION_A)
        assert np.allclose(u, 2 * np.sin(x)) and np.allclose(ux, 2 * np.cos(x))
        u, ux = closure(w, Variant.PROJECTION_B)
        assert np.allclose(ux, 2 * np.sin(x))

    def test_metadata_covers_every_variant(self):
        assert set(VARIANT_METADATA) == set(Variant)
        assert VARIANT_METADATA[Variant.SCALE_INVARIANT_EULER]["parity"] == "even"


class TestEvolution:
    def test_clm_closed_form(self):
        # omega = 4 omega0 / ((2 - t H omega0)^2 + t^2 omega0^2)
        w0 = CircleField.from_function(256, np.cos)
        h = evolve_1d(w0, "clm", 1e-3, 0.5, snapshot_every=100)
        x = w0.x
        for t, f in zip(h.times, h.fields):
            exact = 4 * np.cos(x) / ((2 - t * np.sin(x)) ** 2 + (t * np.cos(x)) ** 2)
            assert np.max(np.abs(f - exact)) < 1e-10

    def test_de_gregorio_sine_is_steady(self):
        w0 = CircleField.from_function(128, np.sin)
        h = evolve_1d(w0, "de_gregorio", 1e-2, 1.0, snapshot_every=10)
        assert max(np.max(np.abs(f - w0.values)) for f in h.fields) < 1e-12

    def test_projection_a_matches_oracle(self):
        f0 = lambda x: np.sin(x) + 0.3 * np.cos(2 * x)
        w0 = CircleField.from_function(128, f0)
        h = evolve_1d(w0, "projection_a", 1e-3, 0.3, snapshot_every=50)
        orc = lambda_oracle(f0, "projection_a", 1e-3, 0.3)
        for t, f in zip(h.times, h.fields):
            assert np.max(np.abs(f - orc.omega(w0.x, t))) < 1e-9
        assert np.allclose(h.Lam, orc.Lambda_at(h.times), atol=1e-10)

    def test_guard_status(self):
        h = evolve_1d(CircleField.from_function(128, np.sin), "projection_b", 1e-3, 3.0, guard=5.0)
        assert h.status == "resolution exceeded"

    def test_dedicated_solvers_refused(self):
        with pytest.raises(ValueError):
            evolve_1d(CircleField.from_function(16, np.sin), "burgers", 1e-3, 0.1)


class TestLambdaOracle:
    def test_transport_at_zero_is_identity(self):
        x = np.linspace(-3, 3, 7)
        for v in ("projection_a", "projection_b"):
            assert np.allclose(transported(np.sin, v, x, 0.0), np.sin(x))

    def test_sine_projection_b_blowup_time(self):
        # omega0 = sin x under u_x = P1 omega: lam = exp(Lambda) gives T* = pi/2 exactly
        orc = lambda_oracle(np.sin, "projection_b", 1e-3, 2.0)
        assert orc.status == "diverged"
        assert abs(orc.T_star - np.pi / 2) < 1e-6

    def test_calpha_data_is_odd_and_holder(self):
        f = calpha_data(0.5)
        x = np.array([1e-6, 1e-4, 0.3])
        assert np.allclose(f(-x), -f(x))
        assert np.isclose(f(1e-6) / f(1e-4), (1e-2) ** 0.5, rtol=1e-3)


class TestBurgers:
    def test_slope_matches_characteristics(self):
        h = burgers_1d(CircleField.from_function(2048, np.sin), 1e-3, 0.9, snapshot_every=10**6)
        assert np.isclose(h.T_star, 1.0, atol=1e-12)
        assert abs(h.max_slope[-1] - characteristic_max_slope(np.cos, 0.9)) < 1e-8
        assert abs(characteristic_max_slope(np.cos, 0.9) - 10.0) < 1e-9

    def test_l1_norm_conserved_and_lp_matches(self):
        # grid quadrature of |u_x| is second order across its zeros
        h = burgers_1d(CircleField.from_function(1024, np.sin), 1e-3, 0.5, snapshot_every=10**6)
        assert abs(h.norms[1.0][-1] - 4.0) < 1e-5
        assert abs(h.norms[1.5][-1] - characteristic_lp(np.cos, 0.5, 1.5)) < 1e-5

    def test_shock_time_refused(self):
        with pytest.raises(ValueError):
            burgers_1d(CircleField.from_function(64, np.sin), 1e-3, 1.01)


class TestScaleInvariantEuler:
    @settings(max_examples=10, deadline=None)
    @given(st.integers(3, 8))
    def test_stream_inverts_mode(self, m):
        x = grid(128)
        g = np.cos(m * x)
        assert np.allclose(sie_stream(g, m), g / (4 - m * m), atol=1e-13)

    def test_sup_is_conserved(self):
        h = scale_invariant_euler(CircleField.from_function(256, lambda x: np.cos(3 * x)), 3, 1e-3, 0.5, 50)
        assert np.allclose(h.sup, h.sup[0], rtol=1e-6)
