"""Rejection sampling of X_n: draw (A, B, C, D) and keep A - B when A - B = C - D.

Draws are organised in fixed-size blocks, block ``j`` seeded from
``SeedSequence(seed, spawn_key=(j,))``. Accepted samples are concatenated in
block order, so a batch depends only on ``(rates, n, count, seed)`` and not
on how many worker threads produced the blocks.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .asymptotics import gamma_of_u
from .core import Rates, check_n, scale

BLOCK = 1 << 16
MIN_ACCEPTANCE = 1e-9


class AcceptanceTooLowError(RuntimeError):
    pass


@dataclass(frozen=True)
class SampleBatch:
    samples: np.ndarray
    attempts: int
    accepted: int
    seed: int
    rates: Rates
    n: int

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "x"])
        writer.writerows(enumerate(self.samples.tolist()))
        return buf.getvalue()


@dataclass(frozen=True)
class EmpiricalSummary:
    mean: float
    variance: float
    stderr_mean: float
    stderr_var: float
    ks_to_gaussian: float


def predicted_log_acceptance(rates, n: int) -> float:
    """Log of the large-n asymptote of ``F_n(1) = P(A_n - B_n = C_n - D_n)``."""
    rates = Rates.of(rates)
    gam = gamma_of_u(rates, 1.0)
    if gam == 0:
        # one side is identically zero: a single Skellam hit, with variance n*sum
        return -0.5 * math.log(2 * math.pi * n * rates.total)
    return (-n * (rates.total - 2 * math.sqrt(gam)) - 0.25 * math.log(gam)
            - math.log(2 * math.sqrt(math.pi * n)))


def _draw_block(mus, seed, index, size):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    a, b, c, d = (rng.poisson(mu, size) for mu in mus)
    left = a - b
    hit = left == c - d
    return left[hit], np.flatnonzero(hit)


def sample_conditional(rates, n: int, count: int, seed: int, workers: int = 1,
                       block: int = BLOCK) -> SampleBatch:
    """Draw ``count`` samples of ``X_n`` by rejection.

    Refuses when the predicted acceptance probability is below
    ``MIN_ACCEPTANCE``; off the balanced manifold
    ``sum(tau) = 2 sqrt(gamma(1))`` it decays exponentially in ``n``.
    """
    rates = Rates.of(rates)
    n = check_n(n)
    if count < 1:
        raise ValueError("count must be >= 1")
    log_acc = predicted_log_acceptance(rates, n)
    if log_acc < math.log(MIN_ACCEPTANCE):
        raise AcceptanceTooLowError(
            f"predicted acceptance {math.exp(log_acc):.3g} is below {MIN_ACCEPTANCE:g}; "
            "use the exact pmf instead of rejection sampling")
    mus = scale(rates, n).astuple()
    seed = int(seed)
    chunks = []
    got = 0
    attempts = 0
    next_block = 0
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        while got < count:
            indices = range(next_block, next_block + max(1, workers))
            next_block += len(indices)
            for kept, where in pool.map(lambda j: _draw_block(mus, seed, j, block), indices):
                if got >= count:
                    break
                need = count - got
                if len(kept) >= need:
                    chunks.append(kept[:need])
                    attempts += int(where[need - 1]) + 1
                    got = count
                    break
                chunks.append(kept)
                got += len(kept)
                attempts += block
    samples = np.concatenate(chunks).astype(np.int64)
    return SampleBatch(samples, attempts, len(samples), seed, rates, n)


def measured_acceptance(rates, n: int, draws: int, seed: int) -> float:
    """Fraction of ``draws`` unconditioned quadruples that satisfy the event."""
    mus = scale(rates, n).astuple()
    hits = 0
    done = 0
    index = 0
    while done < draws:
        size = min(BLOCK, draws - done)
        hits += len(_draw_block(mus, int(seed), index, size)[0])
        done += size
        index += 1
    return hits / draws


def empirical_ks(samples, center: float, spread: float) -> float:
    """Kolmogorov distance of the step cdf of ``(x - center) / spread`` to N(0, 1)."""
    values, counts = np.unique(np.asarray(samples), return_counts=True)
    cdf = np.cumsum(counts) / counts.sum()
    before = np.concatenate([[0.0], cdf[:-1]])
    phi = ndtr((values - center) / spread)
    return float(max(np.max(np.abs(cdf - phi)), np.max(np.abs(before - phi))))


def summarize(batch: SampleBatch, center: float, spread: float) -> EmpiricalSummary:
    x = np.asarray(batch.samples, dtype=float)
    size = len(x)
    if size < 2:
        raise ValueError("need at least 2 samples")
    if not spread > 0:
        raise ValueError(f"spread must be positive, got {spread!r}")
    mean = float(x.mean())
    var = float(x.var(ddof=1))
    m4 = float(np.mean((x - mean) ** 4))
    var_of_var = max((m4 - var * var * (size - 3) / (size - 1)) / size, 0.0)
    return EmpiricalSummary(mean, var, math.sqrt(var / size), math.sqrt(var_of_var),
                            empirical_ks(x, center, spread))
