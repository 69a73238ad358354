import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poissondiff import (
    Rates, conditional_pmf, evaluate_gn, exact_moments, moment_expansion,
    normalized_kolmogorov_distance, skellam_log_pmf,
)
from poissondiff.exact import ConditionalDistribution
from poissondiff.oracles import brute_force_event_probability, brute_force_pmf, total_variation

from conftest import valid_rates


def mp_skellam_log_pmf(mu1, mu2, m):
    """High precision oracle via the Bessel form."""
    with mp.workdps(40):
        mu1, mu2 = mp.mpf(mu1), mp.mpf(mu2)
        if mu2 == 0:
            return float(-mu1 + m * mp.log(mu1) - mp.loggamma(m + 1)) if m >= 0 else -math.inf
        if mu1 == 0:
            return float(-mu2 + (-m) * mp.log(mu2) - mp.loggamma(-m + 1)) if m <= 0 else -math.inf
        return float(-(mu1 + mu2) + mp.mpf(m) / 2 * mp.log(mu1 / mu2)
                     + mp.log(mp.besseli(abs(m), 2 * mp.sqrt(mu1 * mu2))))


class TestSkellam:
    def test_unit_means_at_zero(self):
        # sum_k e^-2 / (k!)^2, 30 digit summation
        assert skellam_log_pmf(1, 1, 0) == pytest.approx(-1.17600645851704371706866, abs=1e-14)

    @pytest.mark.parametrize("mu", [0.3, 1.0, 7.5, 120.0])
    @pytest.mark.parametrize("m", [-2, 0, 3, 40])
    def test_reduces_to_poisson(self, mu, m):
        expected = -mu + m * math.log(mu) - math.lgamma(m + 1) if m >= 0 else -math.inf
        assert skellam_log_pmf(mu, 0, m) == pytest.approx(expected, rel=1e-14, abs=1e-13)

    @pytest.mark.parametrize("mu1, mu2, m", [
        (0.5, 3, 2), (50, 20, 30), (50, 20, -10), (1e3, 1e3, 5), (2000, 1, 1990),
        (1e4, 2e4, -100), (0, 7, -3), (7, 0, 3), (0.01, 0.02, 4),
    ])
    def test_against_high_precision(self, mu1, mu2, m):
        expected = mp_skellam_log_pmf(mu1, mu2, m)
        # absolute log error grows with log-gamma magnitudes at large means
        tol = 1e-13 + 1e-15 * (mu1 + mu2)
        assert skellam_log_pmf(mu1, mu2, m) == pytest.approx(expected, abs=tol)

    def test_impossible_outcomes(self):
        assert skellam_log_pmf(0, 5, 1) == -math.inf
        assert skellam_log_pmf(0, 0, 0) == 0.0
        assert skellam_log_pmf(0, 0, 2) == -math.inf

    @given(st.floats(0, 200), st.floats(0, 200), st.integers(-60, 60))
    def test_exchange_symmetry_is_bitwise(self, mu1, mu2, m):
        assert skellam_log_pmf(mu1, mu2, m) == skellam_log_pmf(mu2, mu1, -m)

    def test_vectorised_normalises(self):
        m = np.arange(-200, 201)
        logp = skellam_log_pmf(30.0, 12.0, m)
        assert np.exp(logp).sum() == pytest.approx(1.0, abs=1e-13)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            skellam_log_pmf(-1, 1, 0)
        with pytest.raises(ValueError):
            skellam_log_pmf(1, 1, 0.5)


class TestConditionalPmf:
    def test_dirac(self):
        d = conditional_pmf((0, 0, 1, 1), 7, 1e-12)
        assert (d.support_lo, d.support_hi) == (0, 0)
        assert d.probs.tolist() == [1.0]
        assert d.truncation_bound == 0.0

    def test_opposite_pair_zero_is_bessel_ratio(self):
        # P(X = a) = (1/(a!)^2) / I0(2), 30 digit reference
        d = conditional_pmf((1, 0, 1, 0), 1, 1e-12)
        assert d.support_lo == 0
        assert d.prob(0) == pytest.approx(0.438676279837048739378845, rel=1e-13)
        assert d.prob(1) == pytest.approx(0.438676279837048739378845, rel=1e-13)
        assert d.prob(2) == pytest.approx(0.109669069959262184844711, rel=1e-13)

    @pytest.mark.parametrize("n", [1, 3, 10])
    def test_balanced_is_symmetric(self, n):
        d = conditional_pmf((1, 1, 1, 1), n)
        assert d.support_lo == -d.support_hi
        np.testing.assert_allclose(d.probs, d.probs[::-1], rtol=0, atol=1e-15)

    @pytest.mark.parametrize("tau", [(2, 1, 1, 1), (1, 0, 1, 1), (0.5, 2, 0, 1), (2, 0.5, 1, 0.5)])
    @pytest.mark.parametrize("n", [1, 4, 12])
    def test_matches_brute_force(self, tau, n):
        d = conditional_pmf(tau, n)
        lo, probs = brute_force_pmf(tau, n)
        assert total_variation(lo, probs, d.support_lo, d.probs) < 1e-10

    @given(valid_rates, st.integers(1, 15), st.sampled_from([1e-6, 1e-9, 1e-12]))
    @settings(max_examples=60, deadline=None)
    def test_normalisation_and_bound(self, rates, n, tol):
        d = conditional_pmf(rates, n, tol)
        assert np.all(d.probs >= 0)
        assert 1 - tol <= d.probs.sum() <= 1 + 1e-12
        assert 0 <= d.truncation_bound <= tol

    def test_window_contains_leading_mean(self):
        me = moment_expansion((2, 1, 1, 1))
        for n in (10, 100, 1000):
            d = conditional_pmf((2, 1, 1, 1), n)
            assert d.support_lo <= round(n * me.e_lead) <= d.support_hi

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            conditional_pmf((1, 1, 1, 1), 3, 0.0)
        with pytest.raises(ValueError):
            conditional_pmf((1, 1, 1, 1), 3, 1.5)

    def test_large_intensity_stays_finite(self):
        d = conditional_pmf((1, 2, 3, 4), 2500)
        assert np.all(np.isfinite(d.probs)) and d.truncation_bound <= 1e-12


class TestMoments:
    def test_point_mass(self):
        m = exact_moments(conditional_pmf((0, 0, 1, 1), 3))
        assert (m.mean, m.variance, m.error_bound) == (0.0, 0.0, 0.0)

    def test_symmetric_mean_zero(self):
        m = exact_moments(conditional_pmf((1, 1, 1, 1), 9))
        assert abs(m.mean) < 1e-14 + m.error_bound

    def test_against_brute_force_at_40(self):
        lo, probs = brute_force_pmf((2, 1, 1, 1), 40)
        m_axis = np.arange(lo, lo + len(probs))
        mean = float(np.dot(probs, m_axis))
        var = float(np.dot(probs, (m_axis - mean) ** 2))
        est = exact_moments(conditional_pmf((2, 1, 1, 1), 40))
        assert est.mean == pytest.approx(mean, abs=1e-9)
        assert est.variance == pytest.approx(var, abs=1e-8)
        # nE + E' with E = 1/sqrt(6), E' = -1/24: the o(1) is already small
        assert abs(est.mean - (40 / math.sqrt(6) - 1 / 24)) < 1e-3


class TestGn:
    @pytest.mark.parametrize("n, u", [(1, 1.0), (3, 0.7), (10, 1.3), (50, 2.0)])
    def test_single_sum_is_bessel(self, n, u):
        expected = float(mp.log(mp.besseli(0, 2 * n * mp.sqrt(u))))
        assert evaluate_gn((1, 0, 1, 0), n, u).log_value == pytest.approx(expected, rel=1e-13)

    def test_unit_rates_n1(self):
        # G_1(1) = e^4 P(A - B = C - D) = I0(4)
        value = evaluate_gn((1, 1, 1, 1), 1, 1.0).log_value
        assert value == pytest.approx(2.42497279551545930992916575, rel=1e-14)
        brute = 4 + math.log(brute_force_event_probability((1, 1, 1, 1), 1))
        assert value == pytest.approx(brute, rel=1e-12)

    @pytest.mark.parametrize("tau", [(2, 1, 1, 1), (1, 0, 1, 1), (0.5, 2, 0, 1)])
    @pytest.mark.parametrize("n", [1, 5])
    def test_definitional_identity(self, tau, n):
        # G_n(1) = exp(n sum tau) F_n(1)
        rates = Rates.of(tau)
        lhs = evaluate_gn(rates, n, 1.0).log_value
        rhs = n * rates.total + math.log(brute_force_event_probability(rates, n))
        assert lhs == pytest.approx(rhs, rel=1e-12)

    @pytest.mark.parametrize("tau", [(2, 1, 1, 1), (1, 0, 1, 1), (0.5, 1.5, 2, 1)])
    @pytest.mark.parametrize("u", [0.9, 1.0, 1.1])
    def test_generating_function_consistency(self, tau, u):
        n = 6
        d = conditional_pmf(tau, n)
        pgf = float(np.sum(d.probs * float(u) ** d.support))
        ratio = math.exp(evaluate_gn(tau, n, u).log_value - evaluate_gn(tau, n, 1.0).log_value)
        assert pgf == pytest.approx(ratio, rel=1e-11)

    def test_bad_u(self):
        with pytest.raises(ValueError):
            evaluate_gn((1, 1, 1, 1), 2, 0.0)


class TestKolmogorov:
    def test_point_mass(self):
        d = conditional_pmf((0, 0, 1, 1), 4)
        assert normalized_kolmogorov_distance(d, 0.0, 1.0) == pytest.approx(0.5)

    def test_hand_built_three_points(self):
        # cdf steps 0 -> 0.25 -> 0.75 -> 1 at -1, 0, 1; worst gap is at 0 where Phi = 0.5
        d = ConditionalDistribution(1, -1, 1, np.array([0.25, 0.5, 0.25]), 0.0)
        assert normalized_kolmogorov_distance(d, 0.0, 1.0) == pytest.approx(0.25, abs=1e-15)
        # centre 1, spread 0.5 puts the support at z = -4, -2, 0
        from scipy.stats import norm
        gaps = [abs(0.25 - norm.cdf(-4)), norm.cdf(-4), abs(0.75 - norm.cdf(-2)),
                abs(0.25 - norm.cdf(-2)), 0.5, 0.25]
        assert normalized_kolmogorov_distance(d, 1.0, 0.5) == pytest.approx(max(gaps), abs=1e-15)

    def test_decreases_along_ladder(self):
        dists = [normalized_kolmogorov_distance(conditional_pmf((1, 1, 1, 1), n), 0, math.sqrt(n))
                 for n in (10, 20, 40)]
        assert dists[0] > dists[1] > dists[2]

    def test_bad_spread(self):
        with pytest.raises(ValueError):
            normalized_kolmogorov_distance(conditional_pmf((1, 1, 1, 1), 2), 0, 0)
