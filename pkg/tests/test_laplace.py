import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poissondiff import LaplaceProblem, asymptote, direct_lattice_sum, laplace_problem, minimize, orient, saddle_point
from poissondiff.laplace import (
    BoundaryError, IndefiniteHessianError, LaplaceError, NonConvergenceError, NotGlobalMinimumError,
)

from conftest import positive_rates


def quadratic(center=0.3, lower=0.0, upper=1.0, start=0.5, psi=None):
    return LaplaceProblem(
        phi=lambda t: (t[0] - center) ** 2,
        psi=psi or (lambda t: np.ones_like(t[0])),
        lower=[lower], upper=[upper], start=[start],
        grad=lambda t: np.array([2 * (t[0] - center)]),
        hess=lambda t: np.array([[2.0]]),
    )


class TestMinimize:
    def test_quadratic_one_step(self):
        found = minimize(quadratic())
        assert found.theta[0] == pytest.approx(0.3, abs=1e-15)
        assert found.iterations == 1
        assert found.positive_definite and found.hessian_det == 2.0

    def test_generic_fixture_from_fixed_start(self):
        problem = laplace_problem((2, 1, 1, 1), 1.0, start=[1.0, 1.0, 0.5])
        found = minimize(problem)
        expected = [math.sqrt(1.5), math.sqrt(2 / 3), 1 / math.sqrt(6)]
        np.testing.assert_allclose(found.theta, expected, rtol=0, atol=1e-10)
        assert found.grad_norm < 1e-12

    def test_single_sum_fixture(self):
        problem = laplace_problem((1, 0, 1, 0), 1.0, lower=[0.1], upper=[3.0])
        assert minimize(problem).theta[0] == pytest.approx(1.0, abs=1e-12)

    def test_finite_difference_derivatives(self):
        problem = laplace_problem((2, 1, 1, 1), 1.0, analytic=False)
        found = minimize(problem)
        np.testing.assert_allclose(found.theta, saddle_point((2, 1, 1, 1)).point, atol=1e-8)
        assert found.hessian_det == pytest.approx(saddle_point((2, 1, 1, 1)).hessian_det, rel=1e-5)

    @given(positive_rates, st.sampled_from([0.8, 1.0, 1.25]))
    @settings(max_examples=20, deadline=None)
    def test_agrees_with_closed_form(self, rates, u):
        rates = orient(rates).oriented_rates
        sd = saddle_point(rates, u)
        found = minimize(laplace_problem(rates, u))
        np.testing.assert_allclose(found.theta, sd.point, rtol=0, atol=1e-10)
        # certificate agrees in sign with the closed-form determinant
        assert found.positive_definite == (sd.hessian_det > 0)
        assert found.hessian_det == pytest.approx(sd.hessian_det, rel=1e-9)

    def test_boundary_flagged(self):
        with pytest.raises(BoundaryError):
            minimize(quadratic(center=1 - 1e-9))

    def test_nonconvergence(self):
        problem = laplace_problem((2, 1, 1, 1), 1.0)
        with pytest.raises(NonConvergenceError):
            minimize(problem, max_iter=2)

    def test_indefinite(self):
        flat = LaplaceProblem(phi=lambda t: t[0] ** 4, psi=lambda t: 1.0, lower=[-1], upper=[1],
                              start=[0.0], grad=lambda t: np.array([4 * t[0] ** 3]),
                              hess=lambda t: np.array([[12 * t[0] ** 2]]))
        with pytest.raises(IndefiniteHessianError):
            minimize(flat)

    def test_local_minimum_rejected_by_scan(self):
        wells = LaplaceProblem(phi=lambda t: (t[0] ** 2 - 1) ** 2 + 0.3 * t[0], psi=lambda t: 1.0,
                               lower=[-2], upper=[2], start=[0.9])
        with pytest.raises(NotGlobalMinimumError):
            minimize(wells)
        assert minimize(wells, global_scan=False).theta[0] > 0

    def test_problem_validation(self):
        with pytest.raises(ValueError):
            quadratic(start=1.0)
        with pytest.raises(ValueError):
            LaplaceProblem(phi=None, psi=None, lower=[0] * 4, upper=[1] * 4, start=[0.5] * 4)


class TestAsymptote:
    def test_single_sum_matches_gn_scale(self):
        # lattice asymptote of psi = 1/x with the two Stirling factors gives G_n's asymptote
        problem = laplace_problem((1, 0, 1, 0), 1.0, lower=[0.1], upper=[3.0])
        a = asymptote(problem)
        sd = saddle_point((1, 0, 1, 0))
        for n in (5, 50, 500):
            assert a.log_In_approx(n) - math.log(2 * math.pi * n) == pytest.approx(sd.log_gn(n), rel=1e-12)

    def test_generic_psi_is_one(self):
        a = asymptote(laplace_problem((1, 1, 1, 1), 1.0))
        assert a.psi_star == pytest.approx(1.0, rel=1e-12)
        assert a.dimension == 3

    def test_psi_scaling(self):
        base = asymptote(quadratic())
        scaled = asymptote(quadratic(psi=lambda t: 3.5 * np.ones_like(t[0])))
        for n in (1, 10, 1000):
            assert scaled.log_In_approx(n) - base.log_In_approx(n) == pytest.approx(math.log(3.5), rel=1e-14)

    def test_zero_psi(self):
        with pytest.raises(LaplaceError):
            asymptote(quadratic(psi=lambda t: 0.0 * t[0]))


class TestLatticeSum:
    def test_quadratic_convergence(self):
        problem = quadratic()
        approx = asymptote(problem)
        errs = [abs(math.expm1(direct_lattice_sum(problem, n) - approx.log_In_approx(n)))
                for n in (50, 100, 200)]
        assert errs[0] > errs[1] > errs[2]

    def test_reflection(self):
        left = quadratic(center=-0.3, lower=-1.0, upper=0.0, start=-0.5)
        right = quadratic()
        for n in (7, 40):
            assert direct_lattice_sum(left, n) == pytest.approx(direct_lattice_sum(right, n), rel=1e-14)

    def test_single_sum_fixture_at_100(self):
        problem = laplace_problem((1, 0, 1, 0), 1.0, lower=[0.1], upper=[3.0])
        err = math.expm1(direct_lattice_sum(problem, 100) - asymptote(problem).log_In_approx(100))
        assert abs(err) < 0.02

    def test_blocking_does_not_change_sum(self):
        problem = laplace_problem((1, 0, 1, 1), 1.0, lower=[0.05, 0.05], upper=[3.0, 3.0])
        assert direct_lattice_sum(problem, 60, block=1000) == pytest.approx(
            direct_lattice_sum(problem, 60), rel=1e-14)

    def test_budget(self):
        with pytest.raises(LaplaceError):
            direct_lattice_sum(laplace_problem((2, 1, 1, 1), 1.0), 10_000, max_points=10 ** 6)
