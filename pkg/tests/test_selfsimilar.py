"""Half-line functions, the linearized operator and profile construction."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eulerlab.selfsimilar import (
    DEFAULT_GRID,
    F0,
    N1,
    N3,
    N4,
    CompatibilityError,
    HalfLineFn,
    NonContraction,
    WeightedNorm,
    apply_L,
    compactness_profile,
    compatibility_defect,
    fixed_point_profile,
    invert_L,
    kernel_alignment,
    kernel_element,
    profile_residual,
    read_profile,
    write_profile,
)

Z = DEFAULT_GRID.z


def fn(values, jet):
    return HalfLineFn(DEFAULT_GRID, values, jet)


class TestHalfLineFn:
    def test_product_rule_on_jet(self):
        f = fn(1 / (1 + Z), (1.0, -1.0))
        g = f * f
        assert g.jet == (1.0, -2.0)
        assert np.allclose(g.values, 1 / (1 + Z) ** 2)

    def test_zdz_of_rational(self):
        # z d/dz of z/(1+z)^2 is z(1-z)/(1+z)^3
        d = kernel_element().zdz()
        assert np.max(np.abs(d.values - Z * (1 - Z) / (1 + Z) ** 3)) < 1e-10

    def test_integrate(self):
        assert abs(fn(1 / (1 + Z) ** 2, (1.0, -2.0)).integrate() - 1.0) < 1e-10

    def test_rejects_wrong_map(self):
        from eulerlab.radial import RadialGrid

        with pytest.raises(ValueError):
            HalfLineFn(RadialGrid("algebraic", 16), np.zeros(17))


class TestOperator:
    def test_square_of_s_is_fixed(self):
        s2 = fn((Z / (1 + Z)) ** 2, (0.0, 0.0))
        assert np.max(np.abs(apply_L(s2).values - s2.values)) < 1e-10

    def test_constant(self):
        assert np.max(np.abs(apply_L(fn(np.ones_like(Z), (1.0, 0.0))).values - (Z - 1) / (Z + 1))) < 1e-12

    def test_kernel(self):
        assert apply_L(kernel_element()).max_abs() < 1e-12

    def test_nonlocal_variant_on_kernel(self):
        out = apply_L(kernel_element(), "nonlocal")
        assert np.max(np.abs(out.values + Z / (1 + Z) ** 3)) < 1e-8

    def test_nonlocal_needs_vanishing_value(self):
        with pytest.raises(ValueError):
            apply_L(F0(), "nonlocal")


class TestInverse:
    def test_worked_pair(self):
        g = invert_L(fn(-1 / (1 + Z) ** 2, (-1.0, 2.0)))
        assert np.max(np.abs(g.values - (1 + 2 * Z) / (1 + Z) ** 2)) < 1e-10
        assert g.jet == (1.0, 0.0)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.3, 3.0))
    def test_round_trip_on_compatible_data(self, a, b, s):
        vals = a / (1 + Z) ** 2 + b * Z / (1 + s * Z) ** 3
        # add a multiple of z/(1+z)^2 (jet (0, 1)) to meet f'(0) + 2 f(0) = 0
        d = -((-2 * a + b) + 2 * a)
        f = fn(vals + d * Z / (1 + Z) ** 2, (a, -2 * a + b + d))
        assert abs(compatibility_defect(f)) < 1e-12
        back = apply_L(invert_L(f))
        assert np.max(np.abs(back.values - f.values)) < 1e-8 * max(1.0, f.max_abs())

    def test_incompatible_data_rejected(self):
        with pytest.raises(CompatibilityError) as exc:
            invert_L(fn(1 / (1 + Z), (1.0, -1.0)))
        assert np.isclose(exc.value.defect, 1.0)

    def test_kernel_alignment_recovers_coefficient(self):
        k = kernel_element()
        c, rest = kernel_alignment(0.3 * k)
        assert np.isclose(c, 0.3) and rest.max_abs() < 1e-12


class TestWeightedNorm:
    def test_parameter_checks(self):
        with pytest.raises(ValueError):
            WeightedNorm(delta=0.5)
        with pytest.raises(ValueError):
            WeightedNorm(c1=0.0)

    def test_plain_norm_of_decaying_function(self):
        # int_0^inf (1+z)^-4 dz = 1/3 in the plain weight, lowest order only
        f = fn(1 / (1 + Z) ** 2, (1.0, -2.0))
        w = WeightedNorm("plain")
        assert abs(w.l2(f.values, f.values, DEFAULT_GRID) - 1 / 3) < 1e-10


class TestNonlinearities:
    def test_degree_two_scaling(self):
        f = fn(Z / (1 + Z) ** 2, (0.0, 1.0))
        for N in (N1, N3, N4):
            assert N.scaling_defect(f, 3.0) < 1e-12

    def test_equivariance_flags(self):
        g = lambda z: z / (1 + z) ** 2
        assert N3.equivariance_defect(g, 2.0) < 1e-8
        assert N1.equivariance_defect(g, 2.0) > 1e-3
        assert N3.equivariant and not N1.equivariant


class TestProfiles:
    def test_zero_eps_gives_f0(self):
        r = fixed_point_profile(N1, 0.0)
        assert r.g.max_abs() < 1e-14 and r.delta == 0.0

    def test_fixed_point_residual_and_methods_agree(self):
        fp = fixed_point_profile(N1, 1e-3)
        assert fp.residual < 1e-9
        assert profile_residual(fp.profile, fp.delta, N1, 1e-3) < 1e-9
        cp = compactness_profile(N1, 1e-3)
        _, rest = kernel_alignment(cp.g - fp.g)
        assert rest.max_abs() < 1e-7

    def test_non_contracting_map_is_reported(self):
        with pytest.raises(NonContraction):
            fixed_point_profile(N3, 1e-3)

    def test_write_and_read(self, tmp_path):
        r = fixed_point_profile(N1, 1e-4)
        write_profile(tmp_path / "p", r)
        g, meta = read_profile(tmp_path / "p")
        assert np.array_equal(g.values, r.normalized().values)
        assert meta["eps"] == 1e-4 and meta["method"] == "fixed_point"
