"""
Mean and variance: exact values against the large-n expansion
=============================================================

E(X_n) = n E + E' + o(1) and V(X_n) = n V + V' + o(1). The residuals halve
when n doubles, which is what an O(1/n) next term looks like.
"""

from poissondiff import moment_expansion, quasi_powers
from poissondiff.study import convergence_study

tau = (2, 1, 1, 1)
me = moment_expansion(tau)
print(f"E={me.e_lead:.12f}  E'={me.e_const:.12f}  V={me.v_lead:.12f}  V'={me.v_const:.12f}")

# The same four numbers come out of the derivatives of f and g at s = 0.
qp = quasi_powers(tau)
print(f"f'(0)={qp.f1:.12f}  g'(0)={qp.g1:.12f}  f''(0)={qp.f2:.12f}  g''(0)={qp.g2:.12f}")

report = convergence_study(tau, [10, 20, 40, 80, 160, 320])
print(f"{'n':>5} {'mean resid':>12} {'ratio':>7} {'var resid':>12} {'ratio':>7} {'KS':>8}")
for row in report.rows:
    mr = row["mean_halving_ratio"]
    vr = row["variance_halving_ratio"]
    print(f"{row['n']:5d} {row['mean_residual']:12.3e} {mr if mr else float('nan'):7.3f} "
          f"{row['variance_residual']:12.3e} {vr if vr else float('nan'):7.3f} {row['ks']:8.4f}")
print(report.verdicts)
