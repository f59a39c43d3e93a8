import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orliczmeasure.addition import (
    check_convergence,
    check_homogeneity,
    check_monotone_bound,
    orlicz_add_field,
    orlicz_add_measure,
    orlicz_add_pointwise,
    solve_values,
)
from orliczmeasure.errors import (
    DomainViolationError,
    InvalidParameterError,
    NumericalFailureError,
)
from orliczmeasure.gauges import (
    CompositorClass,
    MonotoneCompositor,
    make_linear_combo,
    make_power_sum,
    tau0,
    univariate_power,
)
from orliczmeasure.spaces import DensityField, Positivity

from conftest import positive_field, positive_measure, random_space


class TestPointwise:
    def test_linear_sum(self):
        assert orlicz_add_pointwise(make_power_sum(1, 2), [1.0, 2.0]) == 3.0

    def test_euclidean(self):
        assert orlicz_add_pointwise(make_power_sum(2, 2), [3.0, 4.0]) == pytest.approx(5.0, rel=1e-14)

    def test_all_zero_returns_zero(self):
        assert orlicz_add_pointwise(make_power_sum(2, 2), [0.0, 0.0]) == 0.0

    def test_harmonic_closed_form(self):
        # oracle: lam = (1/p1 + 1/p2)^-1
        assert orlicz_add_pointwise(make_power_sum(-1, 2), [1.0, 1.0]) == pytest.approx(0.5, rel=1e-14)
        assert orlicz_add_pointwise(make_power_sum(-1, 2), [2.0, 3.0]) == pytest.approx(1.2, rel=1e-14)

    def test_decreasing_class_rejects_zero(self):
        with pytest.raises(DomainViolationError):
            orlicz_add_pointwise(make_power_sum(-1, 2), [1.0, 0.0])

    def test_negative_values_rejected(self):
        with pytest.raises(DomainViolationError):
            orlicz_add_pointwise(make_power_sum(2, 2), [1.0, -1.0])

    @given(p=st.sampled_from([0.5, 1.0, 2.0, -1.0, -2.0]),
           vals=st.lists(st.floats(0.01, 100.0), min_size=2, max_size=4))
    @settings(max_examples=80, deadline=None)
    def test_power_sums_match_closed_form(self, p, vals):
        # oracle: (sum v^p)^(1/p)
        vals = np.asarray(vals)
        lam = orlicz_add_pointwise(make_power_sum(p, len(vals)), vals)
        expect = float(np.sum(vals ** p) ** (1.0 / p))
        assert lam == pytest.approx(expect, rel=1e-10)

    def test_residual_tolerance_on_generic_compositor(self):
        combo = make_linear_combo(univariate_power(2), univariate_power(0.5), 1.0, 1.0)
        vals = np.array([2.0, 3.0])
        lam = orlicz_add_pointwise(combo, vals)
        assert abs(combo.evaluate(vals / lam) - 1.0) <= 1e-12

    def test_bounded_compositor_raises_no_solution(self):
        # bounded above by 1/2, so no diagonal normalizer exists
        from orliczmeasure.errors import NoSolutionError

        broken = MonotoneCompositor(
            arity=2, klass=CompositorClass.PHI,
            fn=lambda x: 0.5 * (x[0] + x[1]) / (1.0 + x[0] + x[1]))
        with pytest.raises(NoSolutionError):
            solve_values(broken, np.array([[1.0], [2.0]]))

    def test_quantized_compositor_fails_residual(self):
        # value 1 sits inside a quantization gap, so no bisection can meet
        # the residual tolerance
        steppy = MonotoneCompositor(
            arity=2, klass=CompositorClass.PHI,
            fn=lambda x: np.floor((x[0] + x[1]) * 5.0) / 5.0 + 0.1)
        with pytest.raises(NumericalFailureError) as err:
            solve_values(steppy, np.array([[1.0], [2.0]]))
        assert err.value.residual is None or err.value.residual > 1e-12


class TestGenericPath:
    def test_non_separable_compositor_solved_by_generic_bisection(self):
        # max-combination is monotone but has no power representation
        gen = MonotoneCompositor(
            arity=2, klass=CompositorClass.PHI,
            fn=lambda x: np.maximum(x[0], x[1]) + 0.5 * (x[0] + x[1]))
        assert gen.power_terms is None
        vals = np.array([[1.0, 2.0], [2.0, 0.5]])
        lam = solve_values(gen, vals)
        resid = np.abs(gen.evaluate(vals / lam) - 1.0)
        assert np.max(resid) <= 1e-12

    def test_generic_matches_kernel_on_power_sums(self):
        phi = make_power_sum(2.0, 2)
        hidden = MonotoneCompositor(arity=2, klass=CompositorClass.PHI,
                                    fn=phi.fn)  # same map, no power terms
        rng = np.random.default_rng(0)
        vals = rng.uniform(0.0, 4.0, size=(2, 300))
        np.testing.assert_allclose(solve_values(hidden, vals),
                                   solve_values(phi, vals), rtol=1e-12, atol=1e-300)


class TestFieldAndMeasure:
    def test_linear_gives_pointwise_sum(self, rng):
        space = random_space(rng)
        f1, f2 = positive_field(rng, space), positive_field(rng, space)
        out = orlicz_add_field(make_power_sum(1, 2), [f1, f2])
        np.testing.assert_array_equal(out.values, f1.values + f2.values)

    def test_identity_single_summand(self, rng):
        # for a normalized compositor the sum of (p, 0) is p itself
        space = random_space(rng)
        f = positive_field(rng, space)
        zero = DensityField(space=space, values=np.zeros(space.size))
        out = orlicz_add_field(make_power_sum(2, 2), [f, zero])
        np.testing.assert_allclose(out.values, f.values, rtol=1e-12)

    def test_constant_fields_euclidean(self, rng):
        space = random_space(rng)
        f3 = DensityField(space=space, values=np.full(space.size, 3.0))
        f4 = DensityField(space=space, values=np.full(space.size, 4.0))
        out = orlicz_add_field(make_power_sum(2, 2), [f3, f4])
        np.testing.assert_allclose(out.values, 5.0, rtol=1e-14)

    def test_mismatched_spaces_rejected(self, rng):
        f1 = positive_field(rng, random_space(rng, 32))
        f2 = positive_field(rng, random_space(rng, 64))
        with pytest.raises(InvalidParameterError):
            orlicz_add_field(make_power_sum(1, 2), [f1, f2])

    def test_positivity_propagation(self, rng):
        space = random_space(rng)
        f = positive_field(rng, space)
        z = DensityField(space=space, values=np.zeros(space.size))
        strict = orlicz_add_field(make_power_sum(2, 2), [f, f])
        mixed = orlicz_add_field(make_power_sum(2, 2), [f, z])
        assert strict.positivity is Positivity.STRICTLY_POSITIVE
        assert mixed.positivity is Positivity.NONNEGATIVE

    def test_measure_mass_additive_for_linear(self, rng):
        space = random_space(rng)
        m1, m2 = positive_measure(rng, space), positive_measure(rng, space)
        out = orlicz_add_measure(make_power_sum(1, 2), [m1, m2])
        assert out.total() == pytest.approx(m1.total() + m2.total(), rel=1e-14)

    def test_equal_measures_scale_by_tau0(self, rng):
        space = random_space(rng)
        m1 = positive_measure(rng, space)
        out = orlicz_add_measure(make_power_sum(2, 2), [m1, m1])
        np.testing.assert_allclose(out.values, np.sqrt(2.0) * m1.values, rtol=1e-12)
        assert out.total() == pytest.approx(np.sqrt(2.0) * m1.total(), rel=1e-12)

    def test_mass_bound(self, rng):
        space = random_space(rng)
        m1, m2 = positive_measure(rng, space), positive_measure(rng, space)
        out = orlicz_add_measure(make_power_sum(1, 2), [m1, m2])
        assert out.total() <= 2.0 * (m1.total() + m2.total()) * (1 + 1e-12)


class TestHomogeneity:
    def test_r_one_is_exact(self, rng):
        space = random_space(rng)
        fields = [positive_field(rng, space) for _ in range(2)]
        rep = check_homogeneity(make_power_sum(2, 2), fields, 1.0)
        assert rep.max_rel_deviation == 0.0

    def test_r_zero_increasing_class(self, rng):
        space = random_space(rng)
        fields = [positive_field(rng, space) for _ in range(2)]
        rep = check_homogeneity(make_power_sum(2, 2), fields, 0.0)
        assert rep.max_rel_deviation == 0.0

    def test_r_zero_rejected_for_decreasing_class(self, rng):
        space = random_space(rng)
        fields = [positive_field(rng, space) for _ in range(2)]
        with pytest.raises(InvalidParameterError):
            check_homogeneity(make_power_sum(-1, 2), fields, 0.0)

    @given(r=st.floats(0.01, 100.0), p=st.sampled_from([0.5, 2.0, 3.7, -1.0]))
    @settings(max_examples=40, deadline=None)
    def test_random_scales(self, r, p):
        rng = np.random.default_rng(17)
        space = random_space(rng, 64)
        fields = [positive_field(rng, space) for _ in range(2)]
        rep = check_homogeneity(make_power_sum(p, 2), fields, r)
        assert rep.max_rel_deviation <= 1e-10

    def test_seeded_sweep_across_compositors(self):
        # 100 seeded (phi, fields, r) triples stay within 1e-10
        master = np.random.SeedSequence(314)
        for child in master.spawn(100):
            rng = np.random.default_rng(child)
            p = rng.choice([0.5, 1.0, 2.0, -1.0, -2.0])
            m = int(rng.choice([2, 3]))
            space = random_space(rng, 32)
            fields = [positive_field(rng, space) for _ in range(m)]
            rep = check_homogeneity(make_power_sum(p, m), fields, rng.uniform(0.1, 10))
            assert rep.max_rel_deviation <= 1e-10


class TestMonotoneBound:
    def test_equal_fields_hit_diagonal_identity(self, rng):
        # the diagonal normalizer makes the solution exactly f / tau0
        space = random_space(rng)
        f = positive_field(rng, space)
        phi = make_power_sum(2, 2)
        vals = np.stack([f.values, f.values])
        lam = solve_values(phi, vals)
        t0 = tau0(phi)
        np.testing.assert_allclose(lam, f.values / t0, rtol=1e-12)
        assert np.all(lam <= vals.sum(axis=0) / t0 * (1 + 1e-12))

    def test_domination_and_bound(self, rng):
        space = random_space(rng)
        fields = [positive_field(rng, space) for _ in range(3)]
        rep = check_monotone_bound(make_power_sum(0.7, 3), fields)
        assert rep.passed

    def test_zero_fields_increasing(self, rng):
        space = random_space(rng)
        zero = DensityField(space=space, values=np.zeros(space.size))
        rep = check_monotone_bound(make_power_sum(2, 2), [zero, zero])
        assert rep.passed


class TestConvergence:
    def test_linear_shift_sequence(self, rng):
        # oracle: with a linear compositor the distance is exactly 2/i
        space = random_space(rng, 64)
        fields = [positive_field(rng, space) for _ in range(2)]
        phi = make_power_sum(1, 2)
        steps = []
        for i in (1, 2, 4, 8, 16, 1 << 31):
            steps.append([DensityField.infer(space, f.values + 1.0 / i) for f in fields])
        rep = check_convergence(phi, steps, fields, mode="Uniform")
        np.testing.assert_allclose(
            rep.distances, [2.0 / i for i in (1, 2, 4, 8, 16, 1 << 31)], rtol=1e-7)
        assert rep.passed

    def test_multiplicative_sequence_uses_homogeneity(self, rng):
        # oracle: distance is exactly (1/i) * sum by degree-1 homogeneity
        space = random_space(rng, 64)
        fields = [positive_field(rng, space) for _ in range(2)]
        phi = make_power_sum(2, 2)
        base = orlicz_add_field(phi, fields).values
        steps = [[DensityField.infer(space, f.values * (1 + 1.0 / i)) for f in fields]
                 for i in (10, 100, 1 << 31)]
        rep = check_convergence(phi, steps, fields, mode="Uniform")
        expect = [np.max(base) / i for i in (10, 100, 1 << 31)]
        np.testing.assert_allclose(rep.distances, expect, rtol=1e-6)
        assert rep.passed

    def test_geometric_noise_pointwise(self, rng):
        space = random_space(rng, 64)
        fields = [positive_field(rng, space) for _ in range(2)]
        phi = make_power_sum(-1, 2)
        noise = [rng.uniform(0.1, 1.0, size=space.size) for _ in range(2)]
        steps = [[DensityField.infer(space, f.values + n * 2.0 ** -i)
                  for f, n in zip(fields, noise)]
                 for i in range(4, 40, 6)]
        rep = check_convergence(phi, steps, fields, mode="Pointwise")
        assert rep.passed
        assert rep.final_pointwise is not None

    def test_uniform_mode_needs_strictly_positive_limits(self, rng):
        space = random_space(rng, 32)
        zero = DensityField(space=space, values=np.zeros(space.size))
        with pytest.raises(InvalidParameterError):
            check_convergence(make_power_sum(2, 2), [], [zero, zero], mode="Uniform")


class TestExtremeMagnitudes:
    def test_wide_dynamic_range_matches_closed_forms(self):
        # the factor-2 bracket window keeps bisection convergent even when
        # the root sits dozens of orders below the diagonal bound
        rng = np.random.default_rng(0)
        for p, lo, hi in [(2.0, 1e-150, 1e150), (0.5, 1e-100, 1e100),
                          (-1.0, 1e-30, 1e30), (-2.5, 1e-15, 1e15)]:
            phi = make_power_sum(p, 3)
            vals = np.exp(rng.uniform(np.log(lo), np.log(hi), size=(3, 400)))
            if p > 0:
                vals[:, :40] = 0.0
                vals[0, 40:80] = 0.0
            lam = solve_values(phi, vals)
            solved = lam > 0
            closed = (vals ** p).sum(axis=0) ** (1.0 / p)
            dev = np.abs(lam[solved] - closed[solved]) / closed[solved]
            assert dev.max() < 1e-10

    def test_beyond_the_halving_envelope_raises(self):
        # spans past 2^200 exhaust the bracket walk; the documented
        # failure must surface instead of a silent wrong answer
        phi = make_power_sum(-1, 2)
        vals = np.array([[1e-70], [1e70]])
        with pytest.raises(NumericalFailureError):
            solve_values(phi, vals)

    def test_tiny_weight_combination(self):
        rng = np.random.default_rng(1)
        combo = make_linear_combo(univariate_power(2), univariate_power(0.5),
                                  1.0, 1e-12)
        vals = np.exp(rng.uniform(-40, 40, size=(2, 500)))
        lam = solve_values(combo, vals)
        resid = np.abs(combo.evaluate(vals / lam) - 1.0)
        assert resid.max() <= 1e-12


class TestRootResidualInvariant:
    def test_residuals_across_random_solves(self):
        master = np.random.SeedSequence(2718)
        for child in master.spawn(50):
            rng = np.random.default_rng(child)
            p = rng.choice([0.5, 1.0, 2.0, 3.0, -1.0, -2.0])
            m = int(rng.choice([2, 3]))
            phi = make_power_sum(p, m)
            vals = rng.uniform(0.01 if p < 0 else 0.0, 10.0, size=(m, 200))
            lam = solve_values(phi, vals)
            solved = lam > 0
            resid = np.abs(phi.evaluate(vals[:, solved] / lam[solved]) - 1.0)
            assert np.max(resid) <= 1e-12
