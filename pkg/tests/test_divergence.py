import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orliczmeasure.divergence import (
    Direction,
    f_divergence,
    jensen_bound_check,
    proportional_inputs,
    s_norm,
    s_power_integral,
)
from orliczmeasure.errors import DomainViolationError, InvalidParameterError
from orliczmeasure.gauges import BUILTIN_SURFACE_GAUGES, univariate_power
from orliczmeasure.spaces import (
    DensityField,
    Measure,
    SubsetMask,
    uniform_interval_space,
)

from conftest import positive_field, positive_measure, random_space

KL = BUILTIN_SURFACE_GAUGES["kl"]
CHI2 = BUILTIN_SURFACE_GAUGES["chi2"]


class TestFDivergence:
    def test_identical_measures_give_zero_kl(self, rng):
        space = random_space(rng)
        P = positive_measure(rng, space)
        res = f_divergence(KL, P, P)
        assert res.value == 0.0
        assert res.equality_gap == 0.0

    def test_constant_ratio_chi2(self):
        space = uniform_interval_space(128)
        q = Measure.from_values(space, np.ones(128))
        p = Measure.from_values(space, 2.0 * np.ones(128))
        res = f_divergence(CHI2, p, q)
        # ratio 2 everywhere: chi2(2) * mass(Q) = 1
        assert res.value == pytest.approx(1.0, rel=1e-14)

    def test_kl_against_hand_quadrature(self):
        # oracle: P = 2 * uniform on the left half, Q = uniform,
        # D = integral_0^(1/2) 2 ln 2 dx = ln 2
        space = uniform_interval_space(512)
        x = space.points[:, 0]
        p = Measure.from_values(space, np.where(x < 0.5, 2.0, 0.0))
        q = Measure.from_values(space, np.ones(512))
        res = f_divergence(KL, p, q)
        assert res.value == pytest.approx(math.log(2.0), rel=1e-14)

    def test_zero_q_rejected(self, rng):
        space = random_space(rng)
        P = positive_measure(rng, space)
        q = Measure.from_values(space, np.r_[0.0, np.ones(space.size - 1)])
        with pytest.raises(DomainViolationError):
            f_divergence(KL, P, q)

    def test_kernel_without_zero_extension_rejected(self, rng):
        space = random_space(rng)
        q = positive_measure(rng, space)
        p_vals = np.ones(space.size)
        p_vals[0] = 0.0
        p = Measure.from_values(space, p_vals)
        with pytest.raises(DomainViolationError):
            f_divergence(BUILTIN_SURFACE_GAUGES["recip"], p, q)

    def test_weight_scaling_is_affine(self, rng):
        # doubling all base weights doubles the divergence
        space = random_space(rng)
        P, Q = positive_measure(rng, space), positive_measure(rng, space)
        v1 = f_divergence(CHI2, P, Q).value
        from orliczmeasure.spaces import MeasureSpace

        doubled = MeasureSpace(points=space.points, weights=2.0 * space.weights,
                               domain_tag=space.domain_tag)
        P2 = Measure.from_values(doubled, P.values)
        Q2 = Measure.from_values(doubled, Q.values)
        assert f_divergence(CHI2, P2, Q2).value == pytest.approx(2.0 * v1, rel=1e-14)

    def test_nonnegativity_for_convex_kernels(self):
        # strictly convex f with f(1)=0 and equal masses
        master = np.random.SeedSequence(99)
        for child in master.spawn(25):
            rng = np.random.default_rng(child)
            space = random_space(rng, 64)
            P = positive_measure(rng, space)
            q_vals = np.exp(rng.normal(size=64))
            q_vals *= P.total() / np.sum(q_vals * space.weights)
            Q = Measure.from_values(space, q_vals)
            for kernel in (KL, CHI2):
                assert f_divergence(kernel, P, Q).value >= -1e-12

    def test_equality_detection_threshold(self, rng):
        space = random_space(rng)
        P = positive_measure(rng, space)
        res = f_divergence(CHI2, P, P)
        assert res.value <= 1e-12
        bumped = Measure.from_values(space, P.values * (1 + 1e-3))
        assert f_divergence(CHI2, bumped, P).value > 0


class TestSNorm:
    def test_s1_is_mass(self, rng):
        space = random_space(rng)
        f = positive_field(rng, space)
        assert s_norm(f, 1.0) == pytest.approx(f.mass(), rel=1e-14)

    def test_constant_field(self, rng):
        space = random_space(rng)
        c = 2.5
        f = DensityField.infer(space, np.full(space.size, c))
        for s in (0.5, 1.0, 2.0, -1.0):
            assert s_norm(f, s) == pytest.approx(
                c * space.total_weight() ** (1.0 / s), rel=1e-13)

    def test_riemann_refinement_oracle(self):
        # oracle: integral of x^2 on [0,1] -> 1/3 under grid refinement
        prev_err = None
        for n in (64, 256, 1024, 4096):
            space = uniform_interval_space(n)
            f = DensityField.infer(space, space.points[:, 0])
            err = abs(s_power_integral(f, 2.0) - 1.0 / 3.0)
            if prev_err is not None:
                assert err < prev_err
            prev_err = err
        assert s_norm(f, 2.0) == pytest.approx(3.0 ** -0.5, rel=1e-6)

    def test_zero_s_rejected(self, rng):
        f = positive_field(rng, random_space(rng))
        with pytest.raises(InvalidParameterError):
            s_norm(f, 0.0)

    def test_negative_s_needs_positive_values(self, rng):
        space = random_space(rng)
        vals = np.ones(space.size)
        vals[3] = 0.0
        f = DensityField.infer(space, vals)
        with pytest.raises(DomainViolationError):
            s_norm(f, -1.0)

    def test_subset_mask(self, rng):
        space = random_space(rng)
        f = positive_field(rng, space)
        half = SubsetMask(np.arange(space.size // 2))
        manual = np.sum(f.values[: space.size // 2] * space.weights[: space.size // 2])
        assert s_power_integral(f, 1.0, half) == pytest.approx(manual, rel=1e-14)

    @given(s=st.sampled_from([1.0, 1.5, 2.0, 3.0]))
    @settings(max_examples=20, deadline=None)
    def test_triangle_inequality(self, s):
        # Minkowski for the s-norm, s >= 1, over seeded random pairs
        master = np.random.SeedSequence(int(s * 10))
        for child in master.spawn(25):
            rng = np.random.default_rng(child)
            space = random_space(rng, 64)
            f1, f2 = positive_field(rng, space), positive_field(rng, space)
            both = DensityField.infer(space, f1.values + f2.values)
            lhs = s_norm(both, s)
            rhs = s_norm(f1, s) + s_norm(f2, s)
            assert lhs <= rhs * (1 + 1e-12)


class TestProportional:
    def test_detects_scalar_multiples(self, rng):
        space = random_space(rng)
        f = positive_field(rng, space)
        assert proportional_inputs([f.values, 3.0 * f.values, 0.25 * f.values])

    def test_rejects_spread(self, rng):
        space = random_space(rng)
        f = positive_field(rng, space)
        other = f.values * (1 + 1e-2 * rng.normal(size=space.size))
        assert not proportional_inputs([f.values, np.abs(other) + 1e-9])

    def test_zero_reference_pattern(self, rng):
        base = np.r_[np.zeros(4), np.ones(4)]
        assert proportional_inputs([base, 2.0 * base])
        mism = base.copy()
        mism[0] = 1.0
        assert not proportional_inputs([base, mism])


class TestJensenBound:
    def test_proportional_inputs_give_equality(self, rng):
        space = random_space(rng)
        P1 = positive_measure(rng, space)
        P2 = Measure.from_values(space, 1.7 * P1.values)
        rep = jensen_bound_check(BUILTIN_SURFACE_GAUGES["sqrt"], P1, P2)
        assert rep.equality and rep.equality_expected
        assert abs(rep.margin) <= 1e-10 * rep.scale

    def test_concave_direction(self):
        master = np.random.SeedSequence(7)
        for child in master.spawn(30):
            rng = np.random.default_rng(child)
            space = random_space(rng, 64)
            P1, P2 = positive_measure(rng, space), positive_measure(rng, space)
            rep = jensen_bound_check(BUILTIN_SURFACE_GAUGES["sqrt"], P1, P2)
            assert rep.direction is Direction.LE and rep.passed

    def test_convex_direction(self):
        master = np.random.SeedSequence(8)
        for child in master.spawn(30):
            rng = np.random.default_rng(child)
            space = random_space(rng, 64)
            P1, P2 = positive_measure(rng, space), positive_measure(rng, space)
            rep = jensen_bound_check(univariate_power(2.0), P1, P2)
            assert rep.direction is Direction.GE and rep.passed

    def test_undeclared_shape_rejected(self, rng):
        space = random_space(rng)
        P1, P2 = positive_measure(rng, space), positive_measure(rng, space)
        with pytest.raises(InvalidParameterError):
            jensen_bound_check(univariate_power(1.0), P1, P2)
