"""Unit tests of the symmetric-function machinery against independent oracles."""

import math

import numpy as np
import pytest

from yamabe._errors import ConeDomainError, UnsupportedOperationError
from yamabe.symfun import (
    BrokenHomogeneitySpec,
    EigenTuple,
    SymFuncSpec,
    classify_type,
    concavity_margin,
    concavity_margin_suite,
    f_infinity,
    growth_radius,
    interpolation_ball_report,
    matrix_value_and_derivative,
    sample_cone,
    sigma,
    sigma_gradient,
    verify_structure,
)

from oracles import (
    cone_distance_brute_force,
    gradient_by_differences,
    matrix_derivative_by_differences,
    sigma_by_enumeration,
)


S23 = SymFuncSpec("sigma_k_root", n=3, k=2)
S24 = SymFuncSpec("sigma_k_root", n=4, k=2)
Q21 = SymFuncSpec("quotient", n=4, k=2, l=1)


class TestSigma:
    def test_symmetric_case(self):
        assert sigma((1, 1, 1), 2) == pytest.approx(3.0, abs=0)

    def test_ones_n4(self):
        assert sigma((1, 1, 1, 1), 2) == pytest.approx(6.0, abs=0)

    def test_mixed_signs_by_enumeration(self):
        lam = (-0.5, 0.5, 0.5)
        assert sigma_by_enumeration(lam, 2) == pytest.approx(-0.25, abs=0)
        assert sigma(lam, 2) == pytest.approx(-0.25, abs=1e-15)

    def test_order_zero_convention(self):
        assert sigma((2.0, 3.0, 4.0), 0) == 1.0

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            sigma((1, 2, 3), 4)
        with pytest.raises(ValueError):
            sigma_gradient((1, 2, 3), 0)

    def test_random_against_enumeration(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = rng.integers(3, 7)
            lam = rng.standard_normal(n) * 2.0
            for k in range(1, n + 1):
                assert sigma(lam, k) == pytest.approx(
                    sigma_by_enumeration(lam, k), rel=1e-12, abs=1e-12)

    def test_gradient_is_reduced_sigma(self):
        rng = np.random.default_rng(8)
        lam = rng.standard_normal(5)
        g = sigma_gradient(lam, 3)
        for i in range(5):
            reduced = np.delete(lam, i)
            assert g[i] == pytest.approx(sigma_by_enumeration(reduced, 2), rel=1e-12)


class TestConeMembership:
    def test_ones_always_inside(self):
        for n in (3, 4, 5):
            for k in range(1, n + 1):
                spec = SymFuncSpec("sigma_k_root", n=n, k=k)
                assert spec.contains(np.ones(n))

    def test_negative_sigma2_outside(self):
        assert not S23.contains((-0.5, 0.5, 0.5))

    def test_boundary_point_excluded(self):
        assert not S23.contains((0.0, 0.0, 1.0))

    def test_margin_is_relative(self):
        # a tiny but uniformly interior tuple must stay inside
        assert S23.contains(1e-8 * np.ones(3))

    def test_zero_vector_outside(self):
        assert not S23.contains(np.zeros(3))


class TestValueAndGradient:
    def test_value_at_ones(self):
        assert S23.value((1.0, 1.0, 1.0)) == pytest.approx(math.sqrt(3), rel=1e-15)
        assert S23.f_at_ones() == pytest.approx(math.sqrt(3), rel=1e-15)

    def test_value_123(self):
        assert S23.value((1.0, 2.0, 3.0)) == pytest.approx(math.sqrt(11), rel=1e-15)

    def test_gradient_at_ones_is_symmetric(self):
        for spec in (S23, S24, Q21, SymFuncSpec("sigma_k_root", n=5, k=4)):
            g = spec.grad(np.ones(spec.n))
            expected = spec.f_at_ones() / spec.n
            assert np.allclose(g, expected, rtol=1e-13)

    def test_gradient_against_finite_differences(self):
        g = S23.grad(np.array([1.0, 2.0, 3.0]))
        fd = gradient_by_differences(S23.value, np.array([1.0, 2.0, 3.0]))
        assert np.abs(g - fd).max() / np.abs(fd).max() < 1e-6

    def test_outside_cone_raises(self):
        with pytest.raises(ConeDomainError):
            S23.value((-0.5, 0.5, 0.5))
        with pytest.raises(ConeDomainError):
            S23.grad((-0.5, 0.5, 0.5))

    def test_quotient_value(self):
        lam = np.array([1.0, 2.0, 3.0, 4.0])
        expected = sigma_by_enumeration(lam, 2) / sigma_by_enumeration(lam, 1)
        assert Q21.value(lam) == pytest.approx(expected, rel=1e-14)

    def test_quotient_gradient_against_finite_differences(self):
        lam = np.array([0.5, 1.0, 2.0, 3.0])
        fd = gradient_by_differences(Q21.value, lam)
        assert np.abs(Q21.grad(lam) - fd).max() / np.abs(fd).max() < 1e-6


class TestInterpolatedFamily:
    def test_t_one_is_identity(self):
        lam = np.array([1.0, 2.0, 3.0])
        assert S23.value_t(1.0, lam) == pytest.approx(S23.value(lam), rel=1e-15)
        assert S23.in_cone_t(1.0, (-0.5, 0.5, 0.5)) == S23.contains((-0.5, 0.5, 0.5))

    def test_t_zero_is_trace_times_f_ones(self):
        lam = np.array([1.0, 2.0, 3.0])
        assert S23.value_t(0.0, lam) == pytest.approx(lam.sum() * S23.f_at_ones(), rel=1e-14)

    def test_cone_points_stay_inside_for_all_t(self):
        rng = np.random.default_rng(3)
        pts = sample_cone(S24, 100, rng)
        for t in (0.0, 0.3, 0.7, 1.0):
            assert np.all(S24.margin_scores_t(t, pts) > S24.margin)

    def test_dominates_base_value(self):
        rng = np.random.default_rng(4)
        pts = sample_cone(S24, 200, rng)
        for t in (0.0, 0.25, 0.5, 0.9):
            assert np.all(S24.value_t_many(t, pts) >= S24.value_many(pts) - 1e-12)

    def test_interpolated_gradient_matches_finite_differences(self):
        lam = np.array([0.4, 1.0, 2.5])
        for t in (0.0, 0.5, 0.9):
            fd = gradient_by_differences(lambda x: S23.value_t(t, x), lam)
            g = S23.grad_t(t, lam)
            assert np.abs(g - fd).max() / np.abs(fd).max() < 1e-6


class TestNormalDirection:
    def test_at_ones(self):
        nu = S23.normal(1.0, np.ones(3))
        assert np.allclose(nu, np.ones(3) / math.sqrt(3), atol=1e-14)

    def test_unit_and_positive(self):
        rng = np.random.default_rng(5)
        for lam in sample_cone(S24, 50, rng):
            for t in (0.2, 1.0):
                nu = S24.normal(t, lam)
                assert np.linalg.norm(nu) == pytest.approx(1.0, abs=1e-13)
                assert np.all(nu > 0)

    def test_scale_invariance(self):
        rng = np.random.default_rng(6)
        for lam in sample_cone(S24, 50, rng):
            nu1 = S24.normal(0.7, lam)
            nu2 = S24.normal(0.7, 2.0 * lam)
            assert np.abs(nu1 - nu2).max() <= 1e-12

    def test_finite_difference_agreement(self):
        lam = np.array([0.5, 1.5, 2.5])
        fd = gradient_by_differences(lambda x: S23.value_t(0.6, x), lam)
        assert np.abs(S23.normal(0.6, lam) - fd / np.linalg.norm(fd)).max() < 1e-6


class TestClassification:
    def test_sigma_1_root(self):
        c = classify_type(SymFuncSpec("sigma_k_root", n=4, k=1))
        assert c.cone_type == 2
        assert c.f_type == "unbounded"

    def test_sigma_k_root_type_one(self):
        for n, k in ((3, 2), (4, 2), (5, 3), (5, 5)):
            c = classify_type(SymFuncSpec("sigma_k_root", n=n, k=k))
            assert c.cone_type == 1
            assert c.f_type == "unbounded"

    def test_quotient_bounded(self):
        c = classify_type(Q21)
        assert c.cone_type == 1
        assert c.f_type == "bounded"

    def test_growth_radius_certifies_level(self):
        rng = np.random.default_rng(9)
        sample = sample_cone(S24, 50, rng, scale_low=-0.3, scale_high=0.3)
        level = 25.0
        c = classify_type(S24, level=level, compact_sample=sample)
        assert c.growth_radius is not None
        shifted = sample.copy()
        shifted[:, -1] += c.growth_radius
        assert np.all(S24.value_many(shifted) >= level)

    def test_growth_radius_for_bounded_spec_not_produced(self):
        c = classify_type(Q21, level=100.0, compact_sample=np.ones((2, 4)))
        assert c.growth_radius is None

    def test_growth_radius_direct_call(self):
        r = growth_radius(S24, 10.0, np.ones((1, 4)))
        shifted = np.ones(4)
        shifted[-1] += r
        assert S24.value(shifted) >= 10.0


class TestFInfinity:
    def test_quotient_limit_at_ones(self):
        assert f_infinity(Q21, np.ones(3)) == pytest.approx(3.0, abs=1e-14)

    def test_matches_numeric_limit(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            lam_p = 0.5 + rng.uniform(0.0, 2.0, size=3)
            limit = Q21.value(np.append(lam_p, 1e6))
            assert f_infinity(Q21, lam_p) == pytest.approx(limit, rel=1e-5)

    def test_homogeneous_degree_one(self):
        lam_p = np.array([0.5, 1.0, 2.0])
        assert f_infinity(Q21, 2.0 * lam_p) == pytest.approx(
            2.0 * f_infinity(Q21, lam_p), rel=1e-12)

    def test_unbounded_spec_rejected(self):
        with pytest.raises(UnsupportedOperationError):
            f_infinity(S24, np.ones(3))

    def test_outside_projected_cone_rejected(self):
        q32 = SymFuncSpec("quotient", n=4, k=3, l=2)
        with pytest.raises(ConeDomainError):
            f_infinity(q32, np.array([-1.0, -1.0, 5.0]))

    def test_higher_quotient_formula(self):
        q31 = SymFuncSpec("quotient", n=5, k=3, l=1)
        lam_p = np.array([0.5, 1.0, 1.5, 2.0])
        expected = (sigma_by_enumeration(lam_p, 2) / 1.0) ** 0.5
        assert f_infinity(q31, lam_p) == pytest.approx(expected, rel=1e-13)


class TestProjectedConeDistance:
    def test_half_space_closed_form(self):
        pc = S23.projected()
        d, x0, gamma = pc.nearest_boundary(np.array([1.0, 2.0]))
        assert d == pytest.approx(3.0 / math.sqrt(2.0), rel=1e-14)
        assert gamma @ x0 == pytest.approx(0.0, abs=1e-12)
        assert np.all(gamma >= 0)

    def test_boundary_point_gives_zero(self):
        pc = S23.projected()
        assert pc.distance_to_boundary(np.array([-1.0, 1.0])) == 0.0

    def test_whole_space_for_k1(self):
        pc = SymFuncSpec("sigma_k_root", n=4, k=1).projected()
        assert pc.distance_to_boundary(np.array([-5.0, 0.0, 7.0])) == math.inf

    def test_positive_orthant_case(self):
        # parent k = n: the projection is the positivity cone, distance is the
        # smallest coordinate
        pc = SymFuncSpec("sigma_k_root", n=4, k=4).projected()
        lam_p = np.array([0.7, 1.3, 2.0])
        d, x0, gamma = pc.nearest_boundary(lam_p)
        assert d == pytest.approx(0.7, rel=1e-10)
        assert gamma @ np.sort(lam_p) == pytest.approx(d, abs=1e-9)

    def test_curved_cone_against_brute_force(self):
        pc = SymFuncSpec("sigma_k_root", n=4, k=3).projected()  # order-2 cone in R^3
        rng = np.random.default_rng(11)
        for _ in range(5):
            lam_p = np.sort(0.3 + rng.uniform(0.0, 2.0, size=3))
            d, x0, gamma = pc.nearest_boundary(lam_p)
            brute = cone_distance_brute_force(
                lambda y: pc._scores(y) > 0.0, lam_p, seed=int(rng.integers(1e6)))
            assert d == pytest.approx(brute, rel=1e-6, abs=1e-8)
            assert np.all(gamma >= -1e-12)
            assert gamma @ x0 == pytest.approx(0.0, abs=1e-10)
            assert gamma @ lam_p == pytest.approx(d, rel=1e-9, abs=1e-11)

    def test_outside_closure_rejected(self):
        pc = S23.projected()
        with pytest.raises(ConeDomainError):
            pc.nearest_boundary(np.array([-2.0, 1.0]))

    def test_lipschitz_along_segments(self):
        pc = SymFuncSpec("sigma_k_root", n=4, k=3).projected()
        rng = np.random.default_rng(12)
        a = np.sort(0.5 + rng.uniform(0, 1, 3))
        b = np.sort(0.5 + rng.uniform(0, 2, 3))
        taus = np.linspace(0, 1, 11)
        ds = [pc.distance_to_boundary((1 - t) * a + t * b) for t in taus]
        gap = np.linalg.norm(b - a) / 10.0
        for d1, d2 in zip(ds, ds[1:]):
            assert abs(d2 - d1) <= gap + 1e-9


class TestMatrixFunction:
    def test_diagonal_matrix(self):
        w = np.diag([2.0, 0.4, 0.6, 1.0])
        value, _ = matrix_value_and_derivative(S24, 1.0, w)
        assert value == pytest.approx(S24.value(np.array([0.4, 0.6, 1.0, 2.0])), rel=1e-13)

    def test_orthogonal_invariance(self):
        rng = np.random.default_rng(13)
        lam = np.array([0.3, 0.5, 1.0, 2.0])
        q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        w = (q * lam) @ q.T
        v1, _ = matrix_value_and_derivative(S24, 0.8, w)
        q2, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        v2, _ = matrix_value_and_derivative(S24, 0.8, q2 @ w @ q2.T)
        assert abs(v1 - v2) <= 1e-10

    def test_trace_identity(self):
        rng = np.random.default_rng(14)
        lam = np.sort(np.array([0.2, 0.7, 1.1, 3.0]))
        q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        w = (q * lam) @ q.T
        _, deriv = matrix_value_and_derivative(S24, 0.6, w)
        lhs = float(np.einsum("ij,il,jl->", deriv, w, w))
        rhs = float(S24.grad_t(0.6, lam) @ lam ** 2)
        assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_derivative_against_finite_differences(self):
        rng = np.random.default_rng(15)
        lam = np.array([0.35, 0.8, 1.4, 2.2])
        q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        w = (q * lam) @ q.T
        _, deriv = matrix_value_and_derivative(S24, 0.9, w)
        fd = matrix_derivative_by_differences(
            lambda m: matrix_value_and_derivative(S24, 0.9, m)[0], w)
        assert np.abs(deriv - fd).max() / np.abs(fd).max() < 1e-6

    def test_repeated_eigenvalues(self):
        w = np.diag([1.0, 1.0, 1.0, 2.0])
        value, deriv = matrix_value_and_derivative(S24, 1.0, w)
        fd = matrix_derivative_by_differences(
            lambda m: matrix_value_and_derivative(S24, 1.0, m)[0], w)
        assert np.abs(deriv - fd).max() / np.abs(fd).max() < 1e-6

    def test_spectrum_outside_cone_rejected(self):
        with pytest.raises(ConeDomainError):
            matrix_value_and_derivative(S24, 1.0, np.diag([-1.0, 0.1, 0.1, 0.1]))


class TestVerifyStructure:
    def test_sigma_2_root_passes(self):
        report = verify_structure(S24, sample_count=1000, seed=0)
        assert report.passed, report.failed_names()

    def test_quotient_passes(self):
        report = verify_structure(Q21, sample_count=1000, seed=0)
        assert report.passed, report.failed_names()

    def test_broken_degree_two_fails_homogeneity(self):
        report = verify_structure(BrokenHomogeneitySpec(n=4), sample_count=300, seed=0)
        assert not report.passed
        assert "f4_homogeneity" in report.failed_names()

    def test_rejects_empty_sample(self):
        with pytest.raises(ValueError):
            verify_structure(S24, sample_count=0)


class TestBallInclusion:
    def test_passes_default_grid(self):
        report = interpolation_ball_report(S24, directions=300, seed=2)
        assert report.passed

    def test_corner_bound_tight_at_t_zero(self):
        report = interpolation_ball_report(S24, t_values=(0.0,), directions=10, seed=2)
        _, _, corner = report.rows[0]
        # equality case: the slack is the 1e-12 relative epsilon only
        assert 0.0 <= corner <= 1e-10


class TestConcavityMargin:
    def test_equal_points_return_none(self):
        assert concavity_margin(S23, 1.0, np.ones(3), np.ones(3), 0.2) is None

    def test_separated_normals_give_positive_margin(self):
        eps = concavity_margin(S23, 1.0, np.ones(3), np.array([0.01, 0.01, 100.0]), 0.2)
        assert eps is not None and eps > 0
        # direct evaluation of both sides at t = 1
        lam = np.array([0.01, 0.01, 100.0])
        mu = np.ones(3)
        g = S23.grad(lam)
        lhs = g @ (mu - lam)
        rhs = S23.value(mu) - S23.value(lam)
        assert eps == pytest.approx((lhs - rhs) / (g.sum() + 1.0), rel=1e-12)

    def test_mu_outside_cone_rejected(self):
        with pytest.raises(ConeDomainError):
            concavity_margin(S23, 1.0, np.array([-1.0, 0.0, 0.5]), np.ones(3), 0.2)

    def test_randomized_suite_positive(self):
        report = concavity_margin_suite(S23, samples=2000, beta=0.2, seed=0)
        assert report.passed
        assert report.min_margin > 0


class TestEigenTuple:
    def test_sorts_on_construction(self):
        assert EigenTuple.of([3.0, 1.0, 2.0]).values == (1.0, 2.0, 3.0)

    def test_rejects_descending(self):
        with pytest.raises(ValueError):
            EigenTuple((3.0, 2.0, 1.0))

    def test_rejects_short(self):
        with pytest.raises(ValueError):
            EigenTuple.of([1.0, 2.0])

    def test_accepted_by_operations(self):
        tup = EigenTuple.of([1.0, 2.0, 3.0])
        assert S23.value(tup) == pytest.approx(math.sqrt(11), rel=1e-14)


class TestSpecValidation:
    def test_quotient_requires_l(self):
        with pytest.raises(ValueError):
            SymFuncSpec("quotient", n=4, k=2)

    def test_k_range(self):
        with pytest.raises(ValueError):
            SymFuncSpec("sigma_k_root", n=4, k=5)

    def test_root_rejects_l(self):
        with pytest.raises(ValueError):
            SymFuncSpec("sigma_k_root", n=4, k=2, l=1)
