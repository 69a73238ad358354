"""Finite-n ground truth: the conditional pmf of X_n, its moments and G_n(u).

Everything is accumulated in log space. The unnormalized weight of ``X_n = m``
is the product of two Skellam probabilities,

    w(m) = P(A - B = m) P(C - D = m),

and both factors are log-concave in ``m``, so ``w`` is log-concave too. Past
the mode the ratio ``w(m + 1) / w(m)`` is non-increasing, which turns the
last ratio at a window edge into a geometric bound on the omitted tail.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp, ndtr, xlogy

from .core import Rates, classify, scale

# consecutive sub-threshold terms required on each side of a window
EDGE_RUN = 10
MAX_WINDOW = 20_000_000


@dataclass(frozen=True)
class ConditionalDistribution:
    """Truncated pmf table of X_n on ``support_lo .. support_hi``."""

    n: int
    support_lo: int
    support_hi: int
    probs: np.ndarray
    truncation_bound: float

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.support_lo, self.support_hi + 1)

    def prob(self, m: int) -> float:
        if self.support_lo <= m <= self.support_hi:
            return float(self.probs[m - self.support_lo])
        return 0.0

    def cdf(self) -> np.ndarray:
        return np.cumsum(self.probs) / np.sum(self.probs)


@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    variance: float
    error_bound: float


@dataclass(frozen=True)
class GnValue:
    u: float
    log_value: float
    truncation_bound: float


def _check_tol(tol):
    if not 0 < tol < 1:
        raise ValueError(f"tol must lie in (0, 1), got {tol!r}")


def _skellam_terms_mode(mu1, mu2, m):
    # (k + 1)(k + m + 1) = mu1 mu2 balances consecutive series terms
    k = 0.5 * (-m + np.sqrt(m * m + 4.0 * mu1 * mu2))
    return np.maximum(np.floor(k), 0.0)


def _skellam_log_pmf_canonical(mu1, mu2, m):
    """Log pmf for an array ``m >= 0`` (caller has reflected negative m)."""
    m = np.asarray(m, dtype=float)
    out = np.full(m.shape, -np.inf)
    if m.size == 0:
        return out
    if mu2 == 0.0:
        with np.errstate(divide="ignore"):
            return xlogy(m, mu1) - gammaln(m + 1.0) - mu1
    if mu1 == 0.0:
        out[m == 0] = -mu2
        return out
    kstar = _skellam_terms_mode(mu1, mu2, m)
    # curvature of the log term in k at the mode gives its width
    sd = np.sqrt((kstar + 1.0) * (kstar + m + 1.0) / (2.0 * kstar + m + 2.0))
    half = int(math.ceil(12.0 * float(sd.max()))) + 25
    while True:
        j = np.arange(-half, half + 1, dtype=float)
        k = kstar[:, None] + j[None, :]
        valid = k >= 0
        k = np.where(valid, k, 0.0)
        km = k + m[:, None]
        terms = km * math.log(mu1) - gammaln(km + 1.0) + k * math.log(mu2) - gammaln(k + 1.0)
        terms = np.where(valid, terms, -np.inf)
        peak = terms.max(axis=1)
        right = terms[:, -1]
        left = np.where(valid[:, 0], terms[:, 0], -np.inf)
        if np.all(right < peak - 40.0) and np.all(left < peak - 40.0):
            break
        half *= 2
    return logsumexp(terms, axis=1) - (mu1 + mu2)


def skellam_log_pmf(mu1: float, mu2: float, m):
    """``log P(A - B = m)`` for independent ``A ~ Poisson(mu1)``, ``B ~ Poisson(mu2)``.

    Sums the convolution series ``sum_k mu1^(k+m)/(k+m)! mu2^k/k!`` in log
    space over a window centred on its largest term. Accepts a scalar or an
    integer array ``m``; impossible outcomes give ``-inf``.

    The result is exactly symmetric: ``skellam_log_pmf(mu1, mu2, m)`` and
    ``skellam_log_pmf(mu2, mu1, -m)`` return identical floats.
    """
    mu1 = float(mu1)
    mu2 = float(mu2)
    if not (math.isfinite(mu1) and math.isfinite(mu2)) or mu1 < 0 or mu2 < 0:
        raise ValueError(f"Poisson means must be finite and >= 0, got {mu1!r}, {mu2!r}")
    scalar = np.ndim(m) == 0
    m = np.atleast_1d(np.asarray(m))
    if not np.all(m == np.round(m)):
        raise ValueError("m must be integral")
    m = m.astype(np.int64)
    out = np.empty(m.shape, dtype=float)
    hi, lo = (mu1, mu2) if mu1 >= mu2 else (mu2, mu1)
    pos = m > 0
    neg = m < 0
    zero = m == 0
    out[pos] = _skellam_log_pmf_canonical(mu1, mu2, m[pos])
    out[neg] = _skellam_log_pmf_canonical(mu2, mu1, -m[neg])
    out[zero] = _skellam_log_pmf_canonical(hi, lo, m[zero])
    return float(out[0]) if scalar else out


def _geometric_tail(edge, inner):
    """Bound on ``sum_{j>=1} exp(edge) r^j`` with ``r = exp(edge - inner)``, log-concave case."""
    if edge == -np.inf:
        return 0.0
    r = math.exp(edge - inner)
    if r >= 1.0:
        return math.inf
    return math.exp(edge) * r / (1.0 - r)


def _log_concave_window(log_weight, center: int, tol: float):
    """Grow an integer window around ``center`` until both tails are negligible.

    ``log_weight`` maps an integer array to log weights of a log-concave
    sequence. Returns ``(lo, values, bound)`` where ``bound`` certifies the
    omitted mass relative to the mass inside the window.
    """
    log_tol = math.log(tol)
    lo = hi = int(center)
    values = np.asarray(log_weight(np.array([lo])), dtype=float)
    grow_left = grow_right = 16
    while True:
        if grow_left:
            new = np.arange(lo - grow_left, lo)
            values = np.concatenate([log_weight(new), values])
            lo -= grow_left
        if grow_right:
            new = np.arange(hi + 1, hi + 1 + grow_right)
            values = np.concatenate([values, log_weight(new)])
            hi += grow_right
        peak = values.max()
        if peak == -np.inf:
            # nothing found yet: keep widening both sides
            grow_left = grow_right = 2 * max(grow_left, grow_right)
            if hi - lo > MAX_WINDOW:
                raise OverflowError("no mass found within the enumeration budget")
            continue
        cut = peak + log_tol
        shifted = values - peak
        tail_left = _geometric_tail(shifted[0], shifted[1])
        tail_right = _geometric_tail(shifted[-1], shifted[-2])
        inside = float(np.sum(np.exp(shifted)))
        left_ok = np.all(values[:EDGE_RUN] < cut) and tail_left <= tol * inside
        right_ok = np.all(values[-EDGE_RUN:] < cut) and tail_right <= tol * inside
        if left_ok and right_ok:
            return lo, values, (tail_left + tail_right) / inside
        if hi - lo > MAX_WINDOW:
            raise OverflowError("pmf window exceeds the enumeration budget")
        grow_left = 0 if left_ok else max(16, (hi - lo) // 2)
        grow_right = 0 if right_ok else max(16, (hi - lo) // 2)


def _trim(lo, values):
    finite = np.flatnonzero(values > -np.inf)
    first, last = finite[0], finite[-1]
    return lo + int(first), values[first:last + 1]


def _leading_mean(mus):
    mu_a, mu_b, mu_c, mu_d = mus
    denom = (mu_a + mu_d) * (mu_b + mu_c)
    if denom == 0:
        return 0.0
    return (mu_a * mu_c - mu_b * mu_d) / math.sqrt(denom)


def conditional_log_weights(rates, n: int):
    """Vectorised ``m -> log w(m)`` for the scaled intensities."""
    mu_a, mu_b, mu_c, mu_d = scale(rates, n).astuple()

    def log_weight(m):
        return skellam_log_pmf(mu_a, mu_b, m) + skellam_log_pmf(mu_c, mu_d, m)

    return log_weight


def conditional_pmf(rates, n: int, tol: float = 1e-12) -> ConditionalDistribution:
    """Law of ``X_n`` on an adaptive window, renormalised.

    The window starts at the integer nearest ``n E`` and grows until
    ``EDGE_RUN`` terms on each side fall below ``tol`` times the peak and
    the geometric tail bound is below ``tol``.
    """
    rates = Rates.of(rates)
    _check_tol(tol)
    scaled = scale(rates, n)
    if classify(rates).is_dirac:
        return ConditionalDistribution(scaled.n, 0, 0, np.array([1.0]), 0.0)
    center = round(_leading_mean(scaled.astuple()))
    lo, values, bound = _log_concave_window(conditional_log_weights(rates, n), center, tol)
    lo, values = _trim(lo, values)
    weights = np.exp(values - values.max())
    probs = weights / weights.sum()
    return ConditionalDistribution(scaled.n, lo, lo + len(probs) - 1, probs, bound)


def exact_moments(dist: ConditionalDistribution) -> MomentEstimate:
    p = dist.probs / dist.probs.sum()
    m = dist.support.astype(float)
    mean = float(np.dot(p, m))
    variance = float(np.dot(p, (m - mean) ** 2))
    # omitted mass times the largest |m| of a doubled window, for both moments
    radius = 2.0 * max(abs(dist.support_lo), abs(dist.support_hi), 1)
    bound = dist.truncation_bound * (radius + radius * radius)
    return MomentEstimate(mean, max(variance, 0.0), bound)


def evaluate_gn(rates, n: int, u: float, tol: float = 1e-12) -> GnValue:
    """``log G_n(u)`` with ``F_n(u) = exp(-n sum(tau)) G_n(u)``.

    The lattice sum over ``(b, d, g)`` is done as nested sums: the inner sums
    over ``b`` and ``d`` are Skellam series (plain Poisson terms when a
    coefficient vanishes), the outer sum over ``g`` is tilted by ``u**g``.
    """
    rates = Rates.of(rates)
    _check_tol(tol)
    u = float(u)
    if not (u > 0 and math.isfinite(u)):
        raise ValueError(f"u must be positive, got {u!r}")
    scaled = scale(rates, n)
    log_weight = conditional_log_weights(rates, n)
    log_u = math.log(u)

    def tilted(g):
        return log_weight(g) + g * log_u

    mu_a, mu_b, mu_c, mu_d = scaled.astuple()
    gamma = (mu_a * u + mu_d) * (mu_c * u + mu_b) / u
    center = 0 if gamma == 0 else round((mu_a * mu_c * u - mu_b * mu_d / u) / math.sqrt(gamma))
    lo, values, bound = _log_concave_window(tilted, center, tol)
    log_value = float(logsumexp(values)) + (mu_a + mu_b + mu_c + mu_d)
    return GnValue(u, log_value, bound)


def normalized_kolmogorov_distance(dist: ConditionalDistribution, center: float, spread: float) -> float:
    """Sup distance between the cdf of ``(X - center) / spread`` and the standard normal cdf.

    Both one-sided limits of the step cdf are compared at every support
    point, which covers the supremum over the whole real line.
    """
    if not spread > 0:
        raise ValueError(f"spread must be positive, got {spread!r}")
    cdf = dist.cdf()
    before = np.concatenate([[0.0], cdf[:-1]])
    phi = ndtr((dist.support - center) / spread)
    return float(max(np.max(np.abs(cdf - phi)), np.max(np.abs(before - phi))))
