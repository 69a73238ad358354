"""
Saddle points, closed form and numeric
======================================

G_n(u) is a lattice sum of psi(k/n) exp(-n phi_u(k/n)). Its asymptotics come
from the minimum of phi_u. Here the closed-form stationary point is compared
with a damped Newton search, and the Laplace formula with direct lattice sums.
"""

import math

from poissondiff import (
    asymptote, direct_lattice_sum, evaluate_gn, gn_asymptote, laplace_problem, minimize, saddle_point,
)

tau, u = (2, 1, 1, 1), 1.1
sd = saddle_point(tau, u)
found = minimize(laplace_problem(tau, u))
print("closed form", sd.point)
print("Newton     ", found.theta, "steps:", found.iterations)
print("phi* =", sd.phi_star, " det Hessian =", sd.hessian_det, " (Newton:", found.hessian_det, ")")

# Laplace asymptote against the exact lattice sum for the one- and two-dimensional cases.
for rates, lower, upper in [((1, 0, 1, 0), [0.1], [3.0]), ((1, 0, 1, 1), [0.05, 0.05], [3.0, 3.0])]:
    problem = laplace_problem(rates, 1.0, lower=lower, upper=upper)
    approx = asymptote(problem)
    for n in (50, 100, 200, 400):
        err = math.expm1(direct_lattice_sum(problem, n) - approx.log_In_approx(n))
        print(f"  d={problem.dimension} n={n:4d} relative error {err:+.3e}")

# And G_n(u) itself: the ratio to its asymptote tends to 1.
for n in (10, 100, 1000):
    exact = evaluate_gn(tau, n, u).log_value
    print(f"n={n:5d}  G_n / asymptote = {math.exp(exact - gn_asymptote(tau, n, u)):.6f}")
