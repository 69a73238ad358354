"""
Rejection sampling as an independent check
==========================================

Draw Poisson quadruples and keep A - B when it equals C - D. Off the balanced
manifold tau_a + tau_d = tau_b + tau_c the acceptance rate decays exponentially,
and the sampler refuses rather than spin.
"""

import math

from poissondiff import conditional_pmf, exact_moments
from poissondiff.montecarlo import (
    AcceptanceTooLowError, predicted_log_acceptance, sample_conditional, summarize,
)

tau, n = (1, 1, 1, 1), 5
batch = sample_conditional(tau, n, count=100_000, seed=7)
summary = summarize(batch, center=0.0, spread=math.sqrt(n))
truth = exact_moments(conditional_pmf(tau, n))
print(f"acceptance {batch.acceptance_rate:.4f} (predicted {math.exp(predicted_log_acceptance(tau, n)):.4f})")
print(f"mean     {summary.mean:+.5f} +- {summary.stderr_mean:.5f}   exact {truth.mean:+.5f}")
print(f"variance {summary.variance:.5f} +- {summary.stderr_var:.5f}   exact {truth.variance:.5f}")

try:
    sample_conditional((5, 1, 1, 1), 50, count=10, seed=1)
except AcceptanceTooLowError as err:
    print("refused:", err)
