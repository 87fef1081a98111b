"""Action of volume-preserving paths, path perturbations and travel times."""

import warnings

import numpy as np
import pytest
from scipy.special import ellipk

from eulerlab.geometry import (
    EndpointDrift,
    FlowPath,
    action,
    cellular_pressure_hessian,
    cellular_velocity,
    hessian_sup,
    isochronality_defect,
    label_lattice,
    map_jacobian_det,
    minimality_horizon,
    path_from_velocity,
    perturb_path,
    pressure_from_velocity,
    stream_perturbation,
    time_bump,
    travel_time,
)
from eulerlab.spectral2d import Field2D, Grid2D


def cell_stream_grad(X):
    x, y = X[..., 0], X[..., 1]
    return np.cos(x) * np.sin(y), np.sin(x) * np.cos(y)


def quiet_action(path):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return action(path)


class TestAction:
    def test_cellular_flow(self):
        # kinetic energy of the cellular flow is pi^2 per unit time
        p = path_from_velocity(cellular_velocity, 32, np.linspace(0, 1, 21))
        assert quiet_action(p) == pytest.approx(np.pi**2, rel=1e-3)

    def test_translation(self):
        p = path_from_velocity(lambda t, X: np.broadcast_to([1.0, 0.5], X.shape), 16, np.linspace(0, 2, 11))
        assert action(p) == pytest.approx(0.5 * 1.25 * 4 * np.pi**2 * 2, rel=1e-12)
        assert np.max(p.volume_defect()) < 1e-12

    def test_needs_three_times(self):
        p = path_from_velocity(cellular_velocity, 8, [0.0, 1.0])
        with pytest.raises(ValueError):
            action(p)

    def test_volume_warning(self):
        lab = label_lattice(8)
        pos = np.array([lab, lab * 1.1, lab * 1.2])
        p = FlowPath(lab, [0.0, 0.5, 1.0], pos)
        with pytest.warns(RuntimeWarning):
            action(p)
        assert p.warnings

    def test_relabel_invariance(self):
        p = path_from_velocity(cellular_velocity, 16, np.linspace(0, 1, 11))
        perm = np.random.default_rng(0).permutation(p.n_markers)
        assert quiet_action(p.relabeled(perm)) == pytest.approx(quiet_action(p), rel=1e-12)

    def test_shape_check(self):
        with pytest.raises(ValueError):
            FlowPath(label_lattice(4), [0.0, 1.0], np.zeros((3, 4, 4, 2)))

    def test_jacobian_of_shear(self):
        lab = label_lattice(16)
        pos = lab.copy()
        pos[..., 0] += 0.3 * np.sin(lab[..., 1])
        assert np.allclose(map_jacobian_det(lab, pos, 2 * np.pi), 1.0, atol=1e-12)


class TestPerturbation:
    def test_bump_vanishes_at_ends(self):
        assert time_bump(0.0, 0.0, 2.0) == 0.0
        assert time_bump(2.0, 0.0, 2.0) == 0.0
        assert time_bump(1.0, 0.0, 2.0) == pytest.approx(1.0)

    @pytest.mark.parametrize("T", [1.0, 2.0, 3.0])
    def test_short_paths_are_minimal(self, T):
        p = path_from_velocity(cellular_velocity, 32, np.linspace(0, T, 41), substeps=4)
        q = perturb_path(p, stream_perturbation(cell_stream_grad, 0, T), eps=0.1)
        assert quiet_action(q) > quiet_action(p)

    def test_endpoint_drift(self):
        p = path_from_velocity(cellular_velocity, 16, np.linspace(0, 1, 5))
        with pytest.raises(EndpointDrift):
            perturb_path(p, lambda t, X: np.stack([np.sin(X[..., 1]), 0 * X[..., 0]], -1))

    def test_endpoints_fixed(self):
        p = path_from_velocity(cellular_velocity, 16, np.linspace(0, 1, 5))
        q = perturb_path(p, stream_perturbation(cell_stream_grad, 0, 1), eps=0.2)
        assert np.array_equal(q.positions[0], p.positions[0])
        assert np.array_equal(q.positions[-1], p.positions[-1])
        assert not np.allclose(q.positions[2], p.positions[2])


class TestPressure:
    def test_cellular_pressure(self):
        g = label_lattice(64)
        X, Y = g[..., 0], g[..., 1]
        u = cellular_velocity(0, g)
        p = pressure_from_velocity(u[..., 0], u[..., 1])
        assert np.max(np.abs(p - (np.cos(2 * X) + np.cos(2 * Y)) / 4)) < 1e-13
        assert hessian_sup(p) == pytest.approx(1.0, abs=1e-10)

    def test_hessian_formula(self):
        g = label_lattice(32)
        H = cellular_pressure_hessian(g)
        assert np.max(np.linalg.eigvalsh(H)) == pytest.approx(1.0)

    def test_horizon(self):
        assert minimality_horizon(1.0) == pytest.approx(np.pi)
        assert minimality_horizon(4.0) == pytest.approx(np.pi / 2)
        assert minimality_horizon(0.0) == np.inf


class TestTravelTime:
    @pytest.mark.parametrize("a,b", [(1.0, 1.0), (1.5, 0.7)])
    def test_elliptic_oscillator(self, a, b):
        g = Grid2D.torus(128)
        X, Y = g.mesh()
        q = 0.5 * (((X - np.pi) / a) ** 2 + ((Y - np.pi) / b) ** 2)
        tt = travel_time(Field2D(g, np.minimum(q, 2.0)), [0.3, 0.6, 1.0], center=(np.pi, np.pi))
        assert np.allclose(tt.mu, 2 * np.pi * a * b, rtol=1e-3)
        assert max(lv.agreement for lv in tt.levels) < 1e-3

    def test_cellular_elliptic_integral(self):
        g = Grid2D.torus(128)
        X, Y = g.mesh()
        tt = travel_time(Field2D(g, np.sin(X) * np.sin(Y)), [0.9, 0.5, 0.1], center=(np.pi / 2, np.pi / 2))
        assert np.allclose(tt.mu, 4 * ellipk(1 - tt.c**2), rtol=2e-3)

    def test_cellular_not_isochronal(self):
        g = Grid2D.torus(128)
        X, Y = g.mesh()
        psi = Field2D(g, np.sin(X) * np.sin(Y))
        assert isochronality_defect(psi, [0.9, 0.5, 0.1], center=(np.pi / 2, np.pi / 2)) > 0.5

    def test_skips(self):
        g = Grid2D.torus(64)
        X, Y = g.mesh()
        psi = Field2D(g, np.sin(X) * np.sin(Y))
        tt = travel_time(psi, [1.0, 0.0, -0.5], center=(np.pi / 2, np.pi / 2))
        assert tt.levels == []
        assert len(tt.notices) == 3
        with pytest.raises(ValueError):
            isochronality_defect(psi, [-0.5], center=(np.pi / 2, np.pi / 2))

    def test_channel_rejected(self):
        g = Grid2D.channel(16, 8)
        with pytest.raises(ValueError):
            travel_time(Field2D.zeros(g), [0.1])

    def test_csv(self, tmp_path):
        g = Grid2D.torus(64)
        X, Y = g.mesh()
        tt = travel_time(Field2D(g, np.sin(X) * np.sin(Y)), [0.5], center=(np.pi / 2, np.pi / 2))
        tt.write_csv(tmp_path / "t.csv")
        assert (tmp_path / "t.csv").read_text().splitlines()[0] == "c,mu_contour,mu_area"
