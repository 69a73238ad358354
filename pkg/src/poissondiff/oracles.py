"""Independent reference computations used for cross-checking.

None of these share code with the series, closed-form or Newton paths they
are compared against.
"""
from __future__ import annotations

import numpy as np
from scipy.stats import poisson

from .core import Rates, scale


def poisson_table(mu: float, tail: float = 1e-14) -> np.ndarray:
    """Poisson pmf on ``0..K`` with ``P(X > K) <= tail``."""
    if mu == 0:
        return np.array([1.0])
    k_max = int(poisson.isf(tail, mu)) + 1
    return poisson.pmf(np.arange(k_max + 1), mu)


def brute_force_pmf(rates, n: int, tail: float = 1e-14):
    """Conditional law of ``A - B`` given ``A - B = C - D`` by direct enumeration.

    Enumerates every truncated ``(a, b, c)`` and takes ``d = c - (a - b)``.
    Returns ``(lo, probs)`` with ``probs[i] = P(X_n = lo + i)``, normalised.
    """
    mus = scale(Rates.of(rates), n).astuple()
    pa, pb, pc, pd = (poisson_table(mu, tail) for mu in mus)
    a = np.arange(len(pa))[:, None, None]
    b = np.arange(len(pb))[None, :, None]
    c = np.arange(len(pc))[None, None, :]
    m = a - b
    d = c - m
    ok = (d >= 0) & (d < len(pd))
    weight = pa[:, None, None] * pb[None, :, None] * pc[None, None, :] * pd[np.where(ok, d, 0)]
    weight = np.where(ok, weight, 0.0)
    m_full = np.broadcast_to(m, weight.shape)
    lo = -(len(pb) - 1)
    probs = np.bincount((m_full - lo).ravel(), weights=weight.ravel())
    # trim exact zeros on both ends
    nz = np.flatnonzero(probs)
    probs = probs[nz[0]:nz[-1] + 1]
    return lo + int(nz[0]), probs / probs.sum()


def brute_force_event_probability(rates, n: int, tail: float = 1e-14) -> float:
    """``P(A_n - B_n = C_n - D_n)`` by direct enumeration (unnormalised mass)."""
    mus = scale(Rates.of(rates), n).astuple()
    pa, pb, pc, pd = (poisson_table(mu, tail) for mu in mus)
    a = np.arange(len(pa))[:, None, None]
    b = np.arange(len(pb))[None, :, None]
    c = np.arange(len(pc))[None, None, :]
    d = c - (a - b)
    ok = (d >= 0) & (d < len(pd))
    weight = pa[:, None, None] * pb[None, :, None] * pc[None, None, :] * pd[np.where(ok, d, 0)]
    return float(np.sum(np.where(ok, weight, 0.0)))


def total_variation(lo1, p1, lo2, p2) -> float:
    lo = min(lo1, lo2)
    hi = max(lo1 + len(p1), lo2 + len(p2))
    x = np.zeros(hi - lo)
    y = np.zeros(hi - lo)
    x[lo1 - lo:lo1 - lo + len(p1)] = p1
    y[lo2 - lo:lo2 - lo + len(p2)] = p2
    return 0.5 * float(np.abs(x - y).sum())


def central_derivatives(fn, h: float = 1e-4):
    """First and second central differences of ``fn`` at 0."""
    fp, f0, fm = fn(h), fn(0.0), fn(-h)
    return (fp - fm) / (2 * h), (fp - 2 * f0 + fm) / (h * h)
