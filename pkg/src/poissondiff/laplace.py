"""Numeric Laplace method for lattice sums in dimension 1 to 3.

For ``I_n = sum_{k in Z^d, k/n in box} psi(k/n) exp(-n phi(k/n))`` with a
unique interior minimum ``theta*`` of ``phi`` and positive-definite Hessian,

    I_n ~ (2 pi n)^(d/2) psi(theta*) exp(-n phi(theta*)) / sqrt(det Hessian).

``phi`` and ``psi`` take a point as a length-d array. They must also accept
an array of shape ``(d, N)`` and return ``N`` values; the lattice sum and the
global grid scan call them that way.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import logsumexp

BOUNDARY_TOL = 1e-8
SCAN_POINTS = 32
MAX_LATTICE_POINTS = 10 ** 8
FD_GTOL = 1e-9


class LaplaceError(RuntimeError):
    pass


class NonConvergenceError(LaplaceError):
    pass


class BoundaryError(LaplaceError):
    """Minimiser on or near the box boundary: the interior hypothesis fails."""


class IndefiniteHessianError(LaplaceError):
    pass


class NotGlobalMinimumError(LaplaceError):
    pass


@dataclass
class LaplaceProblem:
    phi: Callable
    psi: Callable
    lower: np.ndarray
    upper: np.ndarray
    start: np.ndarray
    grad: Optional[Callable] = None
    hess: Optional[Callable] = None

    def __post_init__(self):
        self.lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        self.upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        self.start = np.atleast_1d(np.asarray(self.start, dtype=float))
        if not (self.lower.shape == self.upper.shape == self.start.shape):
            raise ValueError("lower, upper and start must have the same length")
        if self.dimension not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.dimension}")
        if not np.all(self.lower < self.upper):
            raise ValueError("empty box")
        if not self.is_interior(self.start):
            raise ValueError("start must lie strictly inside the box")

    @property
    def dimension(self) -> int:
        return len(self.lower)

    def is_interior(self, x) -> bool:
        return bool(np.all(x > self.lower) and np.all(x < self.upper))

    def gradient(self, x) -> np.ndarray:
        if self.grad is not None:
            return np.asarray(self.grad(x), dtype=float)
        h = np.finfo(float).eps ** (1 / 3) * (1 + np.abs(x))
        g = np.empty_like(x)
        for i in range(len(x)):
            e = np.zeros_like(x)
            e[i] = h[i]
            g[i] = (self.phi(x + e) - self.phi(x - e)) / (2 * h[i])
        return g

    def hessian(self, x) -> np.ndarray:
        if self.hess is not None:
            return np.asarray(self.hess(x), dtype=float)
        # second differences balance truncation against rounding at eps^(1/4)
        h = np.finfo(float).eps ** (1 / 4) * (1 + np.abs(x))
        d = len(x)
        H = np.empty((d, d))
        f0 = self.phi(x)
        for i in range(d):
            ei = np.zeros(d)
            ei[i] = h[i]
            H[i, i] = (self.phi(x + ei) - 2 * f0 + self.phi(x - ei)) / h[i] ** 2
            for j in range(i):
                ej = np.zeros(d)
                ej[j] = h[j]
                H[i, j] = H[j, i] = (self.phi(x + ei + ej) - self.phi(x + ei - ej)
                                     - self.phi(x - ei + ej) + self.phi(x - ei - ej)) / (4 * h[i] * h[j])
        return H


@dataclass(frozen=True)
class Minimum:
    theta: np.ndarray
    phi_min: float
    grad_norm: float
    hessian: np.ndarray
    leading_minors: tuple
    iterations: int

    @property
    def positive_definite(self) -> bool:
        return all(m > 0 for m in self.leading_minors)

    @property
    def hessian_det(self) -> float:
        return self.leading_minors[-1]


@dataclass(frozen=True)
class LaplaceAsymptote:
    theta_star: np.ndarray
    phi_min: float
    hessian_det: float
    psi_star: float
    dimension: int

    def log_In_approx(self, n) -> float:
        return (0.5 * self.dimension * math.log(2 * math.pi * n) + math.log(self.psi_star)
                - n * self.phi_min - 0.5 * math.log(self.hessian_det))


def leading_minors(H) -> tuple:
    return tuple(float(np.linalg.det(H[:k, :k])) for k in range(1, len(H) + 1))


def _newton_direction(H, g):
    try:
        L = np.linalg.cholesky(H)
    except np.linalg.LinAlgError:
        return -g, False
    return -np.linalg.solve(L.T, np.linalg.solve(L, g)), True


def minimize(problem: LaplaceProblem, gtol: float = 1e-12, max_iter: int = 200,
             global_scan: bool = True) -> Minimum:
    """Damped Newton iteration with step halving, kept strictly inside the box.

    Converges when the gradient norm drops below ``gtol``. Finite
    difference gradients have a noise floor far above 1e-12, so without an
    analytic gradient the threshold is ``FD_GTOL (1 + |phi|)`` instead.

    Raises ``NonConvergenceError``, ``BoundaryError`` (minimiser within
    ``BOUNDARY_TOL`` of a face), ``IndefiniteHessianError`` or
    ``NotGlobalMinimumError`` (a coarse grid scan of the box finds a lower
    value of ``phi``).
    """
    x = problem.start.copy()
    fx = float(problem.phi(x))
    converged = False
    steps = 0
    for it in range(1, max_iter + 1):
        g = problem.gradient(x)
        gnorm = float(np.linalg.norm(g))
        if gnorm < gtol or (problem.grad is None and gnorm < FD_GTOL * (1 + abs(fx))):
            converged = True
            break
        H = problem.hessian(x)
        p, is_newton = _newton_direction(H, g)
        slope = float(g @ p)
        t = 1.0
        for _ in range(80):
            trial = x + t * p
            if problem.is_interior(trial):
                ft = float(problem.phi(trial))
                # near the optimum decreases drop below rounding, so small
                # Newton decrements take the full step
                if ft <= fx + 1e-4 * t * slope or (is_newton and t == 1.0 and -slope < 1e-10 * (1 + abs(fx))):
                    break
            t *= 0.5
        else:
            raise NonConvergenceError(f"line search failed at iteration {it}, x={x}")
        x, fx = trial, ft
        steps += 1
    if not converged:
        raise NonConvergenceError(f"no convergence in {max_iter} iterations, |grad|={gnorm:.3g}")

    margin = min(np.min(x - problem.lower), np.min(problem.upper - x))
    if margin < BOUNDARY_TOL:
        raise BoundaryError(f"minimiser {x} lies within {margin:.3g} of the box boundary")
    H = problem.hessian(x)
    minors = leading_minors(H)
    if not all(m > 0 for m in minors):
        raise IndefiniteHessianError(f"Hessian at {x} is not positive definite: minors {minors}")
    if global_scan:
        _scan(problem, fx)
    return Minimum(x, fx, gnorm, H, minors, steps)


def _scan(problem, fmin):
    axes = [np.linspace(lo, hi, SCAN_POINTS) for lo, hi in zip(problem.lower, problem.upper)]
    grid = np.array([a.ravel() for a in np.meshgrid(*axes, indexing="ij")])
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.asarray(problem.phi(grid), dtype=float)
    lowest = np.nanmin(values)
    if lowest < fmin - 1e-9 * (1 + abs(fmin)):
        where = grid[:, int(np.nanargmin(values))]
        raise NotGlobalMinimumError(f"grid point {where} has phi={lowest} below the minimum {fmin}")


def asymptote(problem: LaplaceProblem, **kwargs) -> LaplaceAsymptote:
    found = minimize(problem, **kwargs)
    psi_star = float(problem.psi(found.theta))
    if psi_star == 0:
        raise LaplaceError("psi vanishes at the minimiser")
    if psi_star < 0:
        raise LaplaceError("psi must be positive at the minimiser for a log-scale asymptote")
    return LaplaceAsymptote(found.theta, found.phi_min, found.hessian_det, psi_star, problem.dimension)


def lattice_axes(problem: LaplaceProblem, n: int):
    return [np.arange(math.ceil(n * lo), math.floor(n * hi) + 1)
            for lo, hi in zip(problem.lower, problem.upper)]


def direct_lattice_sum(problem: LaplaceProblem, n: int, max_points: int = MAX_LATTICE_POINTS,
                       block: int = 2_000_000) -> float:
    """Log of the exact lattice sum, in blocks along the first axis."""
    axes = lattice_axes(problem, n)
    total = math.prod(len(a) for a in axes)
    if total > max_points:
        raise LaplaceError(f"{total} lattice points exceed the budget of {max_points}")
    if total == 0:
        return -math.inf
    first, rest = axes[0], axes[1:]
    rest_grid = [a.ravel() for a in np.meshgrid(*rest, indexing="ij")] if rest else []
    rest_size = len(rest_grid[0]) if rest else 1
    step = max(1, block // rest_size)
    parts = []
    for i in range(0, len(first), step):
        head = first[i:i + step]
        cols = [np.repeat(head, rest_size)] + [np.tile(r, len(head)) for r in rest_grid]
        pts = np.array(cols, dtype=float) / n
        psi = np.asarray(problem.psi(pts), dtype=float)
        if np.any(psi < 0):
            raise LaplaceError("psi must be nonnegative on the lattice")
        with np.errstate(divide="ignore"):
            parts.append(logsumexp(np.log(psi) - n * np.asarray(problem.phi(pts), dtype=float)))
    return float(logsumexp(parts))
