"""Cross-validation suites, one per acceptance criterion.

Each ``check_*`` function returns a :class:`CheckResult`; thresholds are the
pinned acceptance tolerances. The ``verify`` CLI command and the acceptance
tests both run these.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics, exact, laplace, montecarlo, oracles
from .core import Kind, Rates, classify, orient

GRID = (0.0, 0.5, 1.0, 2.0)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}"


def _rel(a, b, floor=1e-300):
    return abs(a - b) / max(abs(a), abs(b), floor)


def random_valid_rates(rng, count, allow_zeros=True, low=0.1, high=3.0):
    """Random non-Dirac quadruples; about a quarter carry a single zero or a zero diagonal."""
    out = []
    while len(out) < count:
        tau = rng.uniform(low, high, size=4)
        if allow_zeros:
            pick = rng.random()
            if pick < 0.15:
                tau[rng.integers(4)] = 0.0
            elif pick < 0.25:
                tau[[0, 2] if rng.random() < 0.5 else [1, 3]] = 0.0
        rates = Rates.of(tau)
        if not classify(rates).is_dirac:
            out.append(rates)
    return out


def check_oracle_equivalence(grid=GRID, ns=range(1, 6), tv_tol=1e-10) -> CheckResult:
    start = time.perf_counter()
    worst = 0.0
    cases = 0
    for tau in np.array(np.meshgrid(*[grid] * 4, indexing="ij")).reshape(4, -1).T:
        rates = Rates.of(tau)
        for n in ns:
            dist = exact.conditional_pmf(rates, n, tol=1e-13)
            lo, probs = oracles.brute_force_pmf(rates, n)
            worst = max(worst, oracles.total_variation(lo, probs, dist.support_lo, dist.probs))
            cases += 1
    elapsed = time.perf_counter() - start
    return CheckResult("1 oracle equivalence (TV <= 1e-10, < 120 s)",
                       worst <= tv_tol and elapsed < 120.0,
                       {"cases": cases, "max_tv": worst, "seconds": elapsed})


def ladder_rows(rates, ladder, tol=1e-12):
    rates = Rates.of(rates)
    expansion = asymptotics.moment_expansion(rates)
    rows = []
    for n in ladder:
        dist = exact.conditional_pmf(rates, n, tol)
        moments = exact.exact_moments(dist)
        ks = exact.normalized_kolmogorov_distance(
            dist, n * expansion.e_lead, math.sqrt(n * expansion.v_lead))
        rows.append({
            "n": n,
            "mean": moments.mean,
            "variance": moments.variance,
            "mean_expansion": expansion.mean(n),
            "variance_expansion": expansion.variance(n),
            "mean_residual": abs(moments.mean - expansion.mean(n)),
            "variance_residual": abs(moments.variance - expansion.variance(n)),
            "moment_error_bound": moments.error_bound,
            "ks": ks,
        })
    return rows


def _halving_ok(values, lo=0.2, hi=0.8):
    ratios = [b / a for a, b in zip(values, values[1:])]
    return ratios, all(lo <= r <= hi for r in ratios)


def _fitted_inverse_n(ns, values):
    # least squares for values ~ C / n
    inv = np.asarray(ns, dtype=float) ** -1
    return float(np.dot(inv, values) / np.dot(inv, inv))


def check_moment_convergence(rates=(2, 1, 1, 1), ladder=(10, 20, 40, 80, 160)) -> CheckResult:
    rows = ladder_rows(rates, ladder)
    detail = {}
    passed = True
    for key in ("mean_residual", "variance_residual"):
        res = [r[key] for r in rows]
        ratios, ratios_ok = _halving_ok(res)
        positive = all(r > 0 for r in res)
        decreasing = all(b < a for a, b in zip(res, res[1:]))
        c = _fitted_inverse_n(ladder[:-1], res[:-1])
        extrap_ok = res[-1] < 10 * c / ladder[-1]
        # the residual must be resolvable above the truncation error
        resolved = all(r[key] > 10 * r["moment_error_bound"] for r in rows)
        detail[key] = {"values": res, "halving_ratios": ratios, "fitted_C": c}
        passed &= positive and decreasing and ratios_ok and extrap_ok and resolved
    return CheckResult("2 moment-expansion convergence (ratios in [0.2, 0.8])", passed, detail)


def check_gaussian_limit(ladder=(10, 20, 40, 80, 160), threshold=0.05) -> CheckResult:
    detail = {}
    passed = True
    for rates in ((1, 1, 1, 1), (2, 1, 1, 1)):
        ks = [r["ks"] for r in ladder_rows(rates, ladder)]
        decreasing = all(b < a for a, b in zip(ks, ks[1:]))
        detail[str(rates)] = ks
        passed &= decreasing and ks[-1] < threshold
    return CheckResult("3 Gaussian limit (KS decreasing, < 0.05 at n=160)", passed, detail)


def check_quasi_powers(count=100, seed=7, rel_tol=1e-10, fd_tol=1e-6, step=1e-4) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst_analytic = 0.0
    worst_fd = 0.0
    for rates in random_valid_rates(rng, count):
        qp = asymptotics.quasi_powers(rates)
        me = asymptotics.moment_expansion(rates)
        pairs = [(me.e_lead, qp.f1), (me.e_const, qp.g1), (me.v_lead, qp.f2), (me.v_const, qp.g2)]
        worst_analytic = max(worst_analytic, *(
            abs(a - b) / max(abs(a), abs(b), 1e-300) if a != b else 0.0 for a, b in pairs))
        f1, f2 = oracles.central_derivatives(lambda s: asymptotics.quasi_powers(rates, s).f_value, step)
        g1, g2 = oracles.central_derivatives(lambda s: asymptotics.quasi_powers(rates, s).g_value, step)
        for fd, an in ((f1, qp.f1), (f2, qp.f2), (g1, qp.g1), (g2, qp.g2)):
            worst_fd = max(worst_fd, abs(fd - an) / max(1.0, abs(an)))
    return CheckResult("4 quasi-powers identity (analytic 1e-10, finite differences 1e-6)",
                       worst_analytic <= rel_tol and worst_fd <= fd_tol,
                       {"max_rel_analytic": worst_analytic, "max_fd_error": worst_fd})


def saddle_residuals(rates, sd):
    ta, tb, tc, td = sd.frame_rates
    x, y, z = sd.x_star, sd.y_star, sd.z_star
    targets = (ta * tb, tc * td, ta * tc * sd.frame_u)
    values = (x * (x + z), y * (y + z), (x + z) * (y + z))
    return max(abs(v - t) / max(1.0, abs(t)) for v, t in zip(values, targets))


def check_saddle_algebra(count=20, seed=11, us=(0.8, 1.0, 1.25)) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst_res = worst_newton = worst_values = 0.0
    points = 0
    for rates in random_valid_rates(rng, count, allow_zeros=False):
        rates = orient(rates).oriented_rates
        for u in us:
            try:
                sd = asymptotics.saddle_point(rates, u)
            except asymptotics.AdmissibilityError:
                continue
            points += 1
            worst_res = max(worst_res, saddle_residuals(rates, sd))
            problem = asymptotics.laplace_problem(rates, u)
            found = laplace.minimize(problem)
            worst_newton = max(worst_newton, float(np.max(np.abs(found.theta - sd.point))))
            phi, _, hess, psi, _, _ = asymptotics.phi_psi_fields(rates, u)
            theta = sd.point
            worst_values = max(worst_values,
                               _rel(float(psi(theta)), sd.psi_star),
                               _rel(float(phi(theta)), sd.phi_star),
                               _rel(float(np.linalg.det(hess(theta))), sd.hessian_det))
    passed = worst_res <= 1e-12 and worst_newton <= 1e-10 and worst_values <= 1e-12 and points > 0
    return CheckResult("5 saddle algebra (residual 1e-12, Newton 1e-10, values 1e-12)", passed,
                       {"points": points, "max_residual": worst_res, "max_newton_error": worst_newton,
                        "max_stationary_value_error": worst_values})


LAPLACE_FIXTURES = {
    "single sum (tau_b = tau_d = 0)": ((1.0, 0.0, 1.0, 0.0), [0.1], [3.0]),
    "double sum (tau_b = 0)": ((1.0, 0.0, 1.0, 1.0), [0.05, 0.05], [3.0, 3.0]),
}


def check_laplace_asymptote(n=200, max_rel=0.05, shrink=(0.4, 0.6)) -> CheckResult:
    detail = {}
    passed = True
    for name, (rates, lower, upper) in LAPLACE_FIXTURES.items():
        problem = asymptotics.laplace_problem(rates, 1.0, lower=lower, upper=upper)
        sd = asymptotics.saddle_point(rates, 1.0)
        errs = [abs(math.expm1(laplace.direct_lattice_sum(problem, m) - sd.log_laplace(m)))
                for m in (n, 2 * n)]
        engine = laplace.asymptote(problem)
        engine_gap = abs(engine.log_In_approx(n) - sd.log_laplace(n))
        ratio = errs[1] / errs[0]
        ok = errs[0] < max_rel and shrink[0] <= ratio <= shrink[1] and engine_gap < 1e-8
        detail[name] = {"rel_error": errs, "ratio": ratio, "engine_log_gap": engine_gap}
        passed &= ok
    return CheckResult("6 Laplace asymptote (< 5% at n=200, doubling shrink in [0.4, 0.6])",
                       passed, detail)


def check_degenerate_consistency(count=20, seed=13, tol=1e-12) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        ta, tc, td = rng.uniform(0.1, 3.0, size=3)
        u = float(rng.uniform(0.5, 2.0))
        n = int(rng.integers(1, 200))
        # tau_b = 0
        rates = Rates(ta, 0.0, tc, td)
        sd = asymptotics.saddle_point(rates, u)
        s21 = ta * tc * u + tc * td
        phi, *_ = asymptotics.phi_psi_fields(rates, u)
        worst = max(worst,
                    _rel(asymptotics.gamma_of_u(rates, u), s21),
                    _rel(-2 * math.sqrt(asymptotics.gamma_of_u(rates, u)), -2 * math.sqrt(s21)),
                    _rel(float(phi(sd.point)), -2 * math.sqrt(s21)),
                    _rel(sd.phi_star, -2 * math.sqrt(s21)),
                    _rel(asymptotics.gn_asymptote(rates, n, u), sd.log_gn(n)))
        # tau_b = tau_d = 0
        rates = Rates(ta, 0.0, tc, 0.0)
        sd = asymptotics.saddle_point(rates, u)
        s22 = ta * tc * u
        phi, *_ = asymptotics.phi_psi_fields(rates, u)
        worst = max(worst,
                    _rel(asymptotics.gamma_of_u(rates, u), s22),
                    _rel(float(phi(sd.point)), -2 * math.sqrt(s22)),
                    _rel(sd.phi_star, -2 * math.sqrt(s22)),
                    _rel(asymptotics.gn_asymptote(rates, n, u), sd.log_gn(n)))
    dirac_ok = True
    for tau in ((0, 0, 1, 1), (1, 0, 0, 2), (3, 1, 0, 0), (0, 2, 1, 0), (0, 0, 0, 1), (0, 0, 0, 0)):
        dist = exact.conditional_pmf(tau, 7)
        dirac_ok &= (dist.support_lo == dist.support_hi == 0 and dist.probs.tolist() == [1.0]
                     and dist.truncation_bound == 0.0)
    return CheckResult("7 degenerate consistency (1e-12, Dirac point mass exact)",
                       worst <= tol and dirac_ok, {"max_rel_error": worst, "dirac_exact": dirac_ok})


def check_monte_carlo(seed=7, count=100_000, n=5, acceptance_n=20, acceptance_draws=1_000_000) -> CheckResult:
    rates = Rates(1, 1, 1, 1)
    batch = montecarlo.sample_conditional(rates, n, count, seed)
    summary = montecarlo.summarize(batch, 0.0, math.sqrt(n))
    truth = exact.exact_moments(exact.conditional_pmf(rates, n))
    z_mean = abs(summary.mean - truth.mean) / summary.stderr_mean
    z_var = abs(summary.variance - truth.variance) / summary.stderr_var
    measured = montecarlo.measured_acceptance(rates, acceptance_n, acceptance_draws, seed)
    predicted = math.exp(montecarlo.predicted_log_acceptance(rates, acceptance_n))
    factor = max(measured / predicted, predicted / measured)
    return CheckResult("8 Monte Carlo agreement (4 stderr, acceptance within x2)",
                       z_mean <= 4 and z_var <= 4 and factor <= 2,
                       {"z_mean": z_mean, "z_variance": z_var, "measured_acceptance": measured,
                        "predicted_acceptance": predicted})


def _aligned(d1, lo2, p2):
    lo = min(d1.support_lo, lo2)
    hi = max(d1.support_hi, lo2 + len(p2) - 1)
    x = np.zeros(hi - lo + 1)
    y = np.zeros(hi - lo + 1)
    x[d1.support_lo - lo:d1.support_hi - lo + 1] = d1.probs
    y[lo2 - lo:lo2 - lo + len(p2)] = p2
    return x, y


def check_symmetries(count=50, seed=17, tol=1e-12) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst_pairs = worst_neg = 0.0
    scaling_exact = True
    for rates in random_valid_rates(rng, count):
        n = int(rng.integers(1, 30))
        dist = exact.conditional_pmf(rates, n)
        swapped = exact.conditional_pmf(rates.swap_pairs(), n)
        x, y = _aligned(dist, swapped.support_lo, swapped.probs)
        worst_pairs = max(worst_pairs, float(np.max(np.abs(x - y))))
        negated = exact.conditional_pmf(rates.swap_signs(), n)
        x, y = _aligned(dist, -negated.support_hi, negated.probs[::-1])
        worst_neg = max(worst_neg, float(np.max(np.abs(x - y))))
        unit = exact.conditional_pmf(Rates.of(n * t for t in rates), 1)
        scaling_exact &= (unit.support_lo == dist.support_lo
                          and np.array_equal(unit.probs, dist.probs))
    return CheckResult("9 symmetry suite (1e-12, scaling exact)",
                       worst_pairs <= tol and worst_neg <= tol and scaling_exact,
                       {"max_pair_swap_diff": worst_pairs, "max_negation_diff": worst_neg,
                        "scaling_exact": scaling_exact})


SUITES = {
    "exact": (check_oracle_equivalence,),
    "expansion": (check_moment_convergence, check_gaussian_limit),
    "quasi-powers": (check_quasi_powers,),
    "saddle": (check_saddle_algebra,),
    "laplace": (check_laplace_asymptote,),
    "degenerate": (check_degenerate_consistency,),
    "montecarlo": (check_monte_carlo,),
    "symmetry": (check_symmetries,),
}


def run_suite(name: str = "all", seed: int | None = None) -> list[CheckResult]:
    if name == "all":
        checks = [c for group in SUITES.values() for c in group]
    else:
        checks = list(SUITES[name])
    results = []
    for check in checks:
        if seed is not None and "seed" in check.__code__.co_varnames:
            results.append(check(seed=seed))
        else:
            results.append(check())
    return results
