"""Pressureless flows with nilpotent data gradient."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm
from scipy.stats import special_ortho_group

from eulerlab.pressureless import (
    NilpotentFlow,
    blowup_family_curve,
    chain_gradient,
    chain_norm_at_origin,
    check_nilpotent,
    evolve_gradient,
    lagrangian_map,
    lattice,
    neumann_gradient,
    ode_gradient,
    resolvent_gradient,
    rotation_flow,
    row_sum_norm,
    sample_points,
)


def strictly_upper(rng, d):
    return np.triu(rng.normal(size=(d, d)), 1)


class TestNilpotency:
    @pytest.mark.parametrize("d", [2, 3, 5, 8])
    def test_sine_chain_passes(self, d):
        rep = check_nilpotent(NilpotentFlow.sine_chain(d))
        assert rep.passed
        assert rep.power_defect == 0.0

    def test_conjugated_chain_passes(self):
        Q = special_ortho_group.rvs(4, random_state=3)
        rep = check_nilpotent(NilpotentFlow.sine_chain(4).conjugated(Q))
        assert rep.passed

    def test_rotation_fails(self):
        rep = check_nilpotent(rotation_flow(3))
        assert not rep.passed
        assert rep.power_defect == pytest.approx(1.0)

    def test_evolve_refuses_rotation(self):
        with pytest.raises(ValueError):
            evolve_gradient(rotation_flow(3), np.zeros(3), [0.5])

    def test_chain_length_checked(self):
        with pytest.raises(ValueError):
            NilpotentFlow(3, chain=[(np.sin, np.cos)])
        with pytest.raises(ValueError):
            NilpotentFlow(1, chain=[])


class TestGradientRoutes:
    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**31 - 1), d=st.integers(2, 7), t=st.floats(-3.0, 3.0))
    def test_finite_sum_equals_resolvent(self, seed, d, t):
        A0 = strictly_upper(np.random.default_rng(seed), d)
        assert np.allclose(neumann_gradient(A0, t), resolvent_gradient(A0, t), atol=1e-9 * (1 + abs(t)) ** d)

    def test_resolvent_matches_ode(self):
        A0 = strictly_upper(np.random.default_rng(0), 4)
        assert np.max(np.abs(ode_gradient(A0, 1.5) - neumann_gradient(A0, 1.5))) < 1e-11

    def test_riccati_by_matrix_exponential(self):
        # (I + t A0)^-1 for nilpotent A0 equals the exponential of -log(I + t A0)
        A0 = strictly_upper(np.random.default_rng(1), 3)
        t = 0.7
        N = t * A0
        log = N - N @ N / 2
        inv = expm(-log)
        assert np.allclose(A0 @ inv, neumann_gradient(A0, t), atol=1e-12)

    def test_singular_resolvent(self):
        with pytest.raises(FloatingPointError):
            resolvent_gradient(np.array([[-1.0, 0.0], [0.0, 0.0]]), 1.0)

    def test_evolve_gradient_defects(self):
        flow = NilpotentFlow.sine_chain(4)
        tr = evolve_gradient(flow, [0.3, 1.1, -0.4, 2.0], np.linspace(0, 2, 5))
        assert tr.resolvent_defect < 1e-12
        assert tr.ode_defect < 1e-10
        assert tr.det_defect < 1e-12
        assert tr.norms().shape == (5,)

    def test_chain_formula_matches_finite_sum(self):
        flow = NilpotentFlow.sine_chain(5)
        X = sample_points(5, 50)
        A = chain_gradient(flow.superdiagonal(X), 1.3)
        B = np.array([neumann_gradient(a0, 1.3) for a0 in flow.grad(X)])
        assert np.allclose(A, B, atol=1e-12)

    def test_conjugation_is_similarity(self):
        Q = special_ortho_group.rvs(3, random_state=7)
        base = NilpotentFlow.sine_chain(3)
        flow = base.conjugated(Q)
        y = np.array([[0.2, -1.0, 0.5]])
        assert np.allclose(flow.grad(y)[0], Q @ base.grad(y @ Q)[0] @ Q.T)


class TestNormGrowth:
    @pytest.mark.parametrize("d", [2, 3, 4, 6])
    @pytest.mark.parametrize("t", [0.0, 0.5, 0.9, 2.0])
    def test_origin_row_sum(self, d, t):
        flow = NilpotentFlow.sine_chain(d)
        A = chain_gradient(flow.superdiagonal(np.zeros((1, d))), t)
        expect = (1 - t ** (d - 1)) / (1 - t) if t != 1 else d - 1
        assert row_sum_norm(A)[0] == pytest.approx(expect, rel=1e-14)
        assert chain_norm_at_origin(d, t) == pytest.approx(expect, rel=1e-14)

    def test_family_table_below_bound(self):
        t_grid = [0.0, 0.25, 0.5, 0.75, 0.95]
        table = blowup_family_curve([2, 3, 5], t_grid, n_samples=2000)
        for r in table.rows:
            assert r.norm_global <= r.bound * (1 + 1e-12)
            assert r.norm_global >= r.norm_at_0 - 1e-12
        assert table.lookup(5, 0.5).norm_at_0 == pytest.approx(1.875)
        with pytest.raises(KeyError):
            table.lookup(4, 0.5)

    def test_table_csv(self, tmp_path):
        table = blowup_family_curve([3], [0.0, 0.5], n_samples=100)
        table.write_csv(tmp_path / "n.csv")
        lines = (tmp_path / "n.csv").read_text().splitlines()
        assert lines[0] == "d,t,norm_at_0,norm_global,bound"
        assert len(lines) == 3


class TestLagrangian:
    @pytest.mark.parametrize("t", [0.5, 3.0])
    def test_volume_preserved(self, t):
        flow = NilpotentFlow.sine_chain(3)
        chk = lagrangian_map(flow, lattice(3, 6), t)
        assert chk.volume_preserved

    def test_rotation_not_volume_preserving(self):
        chk = lagrangian_map(rotation_flow(2), lattice(2, 4), 1.0)
        # det(I + t A0) = 1 + t^2 for a rotation block
        assert chk.det_defect == pytest.approx(1.0, rel=1e-8)
        assert not chk.volume_preserved

    def test_characteristics_carry_velocity(self):
        flow = NilpotentFlow.sine_chain(3)
        X = lattice(3, 4)
        chk = lagrangian_map(flow, X, 0.8)
        assert np.allclose(chk.mapped, X + 0.8 * flow.u0(X))

    def test_lattice_shape(self):
        assert lattice(3, 5).shape == (125, 3)
        assert sample_points(2, 10).shape == (11, 2)
