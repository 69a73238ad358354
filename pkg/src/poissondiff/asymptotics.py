"""Closed forms for the large-n behaviour of X_n.

Everything is driven by

    gamma(u) = (tau_a sqrt(u) + tau_d / sqrt(u)) (tau_c sqrt(u) + tau_b / sqrt(u))
             = tau_a tau_c u + (tau_a tau_b + tau_c tau_d) + tau_b tau_d / u,

with ``G_n(u) ~ gamma(u)^(-1/4) exp(2 n sqrt(gamma(u))) / (2 sqrt(pi n))``.
The Laplace transform of ``X_n`` then behaves like ``exp(n f(s) + g(s))``
and the moments follow from derivatives of ``f`` and ``g`` at 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import xlogy

from .core import Kind, Rates, RatesError, classify, check_n
from .laplace import LaplaceProblem


class AdmissibilityError(ValueError):
    """The stationary point is not interior to the summation domain."""


@dataclass(frozen=True)
class AsymptoticMoments:
    e_lead: float
    e_const: float
    v_lead: float
    v_const: float

    def mean(self, n) -> float:
        return n * self.e_lead + self.e_const

    def variance(self, n) -> float:
        return n * self.v_lead + self.v_const


@dataclass(frozen=True)
class SaddleData:
    """Stationary point of ``phi_u`` and the values entering the Laplace formula.

    Coordinates are those of the reduced problem ``(frame_rates, frame_u)``:
    a single vanishing coefficient is moved to position B and a vanishing
    diagonal to (B, D) using the exchange symmetries. ``y_star`` and
    ``z_star`` are ``None`` when the lattice has fewer dimensions.
    """

    x_star: float
    y_star: Optional[float]
    z_star: Optional[float]
    psi_star: float
    phi_star: float
    hessian_det: float
    dimension: int
    frame_rates: Rates
    frame_u: float

    @property
    def point(self) -> np.ndarray:
        return np.array([c for c in (self.x_star, self.y_star, self.z_star) if c is not None])

    def log_laplace(self, n) -> float:
        """Log of ``(2 pi n)^(d/2) psi* exp(-n phi*) / sqrt(hessian)``."""
        return (0.5 * self.dimension * math.log(2 * math.pi * n) + math.log(self.psi_star)
                - n * self.phi_star - 0.5 * math.log(self.hessian_det))

    def log_gn(self, n) -> float:
        """Log asymptote of ``G_n(u)``: the Stirling prefactor carries ``d + 1`` factors of ``(2 pi n)^(-1/2)``."""
        return self.log_laplace(n) - 0.5 * (self.dimension + 1) * math.log(2 * math.pi * n)


@dataclass(frozen=True)
class QuasiPowersPair:
    s: float
    f_value: float
    g_value: float
    f1: float
    f2: float
    g1: float
    g2: float
    beta_n: str = "n"


def _check_u(u):
    u = float(u)
    if not (u > 0 and math.isfinite(u)):
        raise ValueError(f"u must be positive, got {u!r}")
    return u


def _non_dirac(rates):
    rates = Rates.of(rates)
    case = classify(rates)
    if case.is_dirac:
        raise RatesError(f"{tuple(rates)} is a Dirac case: X_n is identically 0")
    return rates, case


def gamma_of_u(rates, u: float) -> float:
    ta, tb, tc, td = Rates.of(rates)
    u = _check_u(u)
    su = math.sqrt(u)
    return (ta * su + td / su) * (tc * su + tb / su)


def gamma_derivatives(rates, u: float = 1.0) -> tuple[float, float, float]:
    """``gamma(u)``, ``d gamma / du`` and ``d^2 gamma / du^2``."""
    ta, tb, tc, td = Rates.of(rates)
    u = _check_u(u)
    g0 = ta * tc * u + ta * tb + tc * td + tb * td / u
    g1 = ta * tc - tb * td / u ** 2
    g2 = 2.0 * tb * td / u ** 3
    return g0, g1, g2


def moment_expansion(rates) -> AsymptoticMoments:
    """``E(X_n) = n E + E' + o(1)`` and ``V(X_n) = n V + V' + o(1)``.

    Valid for unoriented rates: the formulas are odd (E, E') or even
    (V, V') under the A<->B, C<->D exchange.
    """
    rates, _ = _non_dirac(rates)
    ta, tb, tc, td = rates
    h = (ta + td) * (tb + tc)
    diff = ta * tc - tb * td
    e_lead = diff / math.sqrt(h)
    e_const = -diff / (4.0 * h)
    v_lead = ((ta * tc + 2 * ta * tb + tb * td) * (ta * tc + 2 * tc * td + tb * td)
              / (2.0 * h ** 1.5))
    v_const = -((ta * tc + tb * td) * (ta * tb + tc * td) + 4 * ta * tb * tc * td) / (4.0 * h * h)
    return AsymptoticMoments(e_lead, e_const, v_lead, v_const)


def quasi_powers(rates, s: float = 0.0) -> QuasiPowersPair:
    """``f(s) = 2 (sqrt(gamma(e^s)) - sqrt(gamma(1)))``, ``g(s) = -(log gamma(e^s) - log gamma(1)) / 4``.

    Derivatives at 0 use the chain rule through ``u = e^s``:
    ``d/ds gamma = u gamma'``, ``d^2/ds^2 gamma = u gamma' + u^2 gamma''``.
    """
    rates, _ = _non_dirac(rates)
    s = float(s)
    gam0, dgam, d2gam = gamma_derivatives(rates, 1.0)
    gam_s = gamma_of_u(rates, math.exp(s))
    f_value = 2.0 * (math.sqrt(gam_s) - math.sqrt(gam0))
    g_value = -0.25 * (math.log(gam_s) - math.log(gam0))

    h1 = dgam
    h2 = dgam + d2gam
    f1 = h1 / math.sqrt(gam0)
    f2 = h2 / math.sqrt(gam0) - h1 * h1 / (2.0 * gam0 ** 1.5)
    g1 = -h1 / (4.0 * gam0)
    g2 = -(h2 * gam0 - h1 * h1) / (4.0 * gam0 * gam0)
    return QuasiPowersPair(s, f_value, g_value, f1, f2, g1, g2)


def gn_asymptote(rates, n: int, u: float = 1.0) -> float:
    """Log of the leading-order asymptote of ``G_n(u)``."""
    rates, _ = _non_dirac(rates)
    n = check_n(n)
    saddle_point(rates, u)  # admissibility
    gam = gamma_of_u(rates, u)
    return 2 * n * math.sqrt(gam) - 0.25 * math.log(gam) - math.log(2 * math.sqrt(math.pi * n))


# ---------------------------------------------------------------------------
# Stationary points


def _reduce(rates, u, case):
    """Move zeros to B (and D) via the exchange symmetries."""
    if case.kind is Kind.SINGLE_ZERO:
        if case.zero == "b":
            return rates, u
        if case.zero == "d":
            return rates.swap_pairs(), u
        if case.zero == "a":
            return rates.swap_signs(), 1.0 / u
        return rates.swap_signs().swap_pairs(), 1.0 / u
    if case.kind is Kind.OPPOSITE_PAIR_ZERO:
        if case.zero == "bd":
            return rates, u
        return rates.swap_signs(), 1.0 / u
    return rates, u


def saddle_point(rates, u: float = 1.0) -> SaddleData:
    rates, case = _non_dirac(rates)
    u = _check_u(u)
    frame, fu = _reduce(rates, u, case)
    ta, tb, tc, td = frame
    su = math.sqrt(fu)

    if case.kind is Kind.GENERIC:
        p = ta * su + td / su
        q = tc * su + tb / su
        gam = p * q
        x = tb / su * math.sqrt(p / q)
        y = td / su * math.sqrt(q / p)
        z = (ta * tc * fu - tb * td / fu) / math.sqrt(gam)
        if not (x > 0 and y > 0 and z > max(-x, -y)):
            raise AdmissibilityError(
                f"u={u!r}: need x*>0, y*>0 and z*>max(-x*,-y*), got x*={x}, y*={y}, z*={z}")
        prod = ta * tb * tc * td
        return SaddleData(x, y, z, 1.0 / math.sqrt(prod), -2.0 * math.sqrt(gam),
                          2.0 / prod * math.sqrt(gam), 3, frame, fu)

    if case.kind is Kind.SINGLE_ZERO:
        gam = ta * tc * fu + tc * td
        x = ta * tc * fu / math.sqrt(gam)
        y = tc * td / math.sqrt(gam)
        if not (x > 0 and y > 0):
            raise AdmissibilityError(f"u={u!r}: need x*>0 and y*>0, got x*={x}, y*={y}")
        core = ta * tc * tc * td * fu
        return SaddleData(x, y, None, gam ** 0.25 / math.sqrt(core), -2.0 * math.sqrt(gam),
                          2.0 * gam / core, 2, frame, fu)

    x = math.sqrt(ta * tc * fu)
    if not x > 0:
        raise AdmissibilityError(f"u={u!r}: need x*>0, got {x}")
    return SaddleData(x, None, None, 1.0 / x, -2.0 * x, 2.0 / x, 1, frame, fu)


# ---------------------------------------------------------------------------
# The exponent phi_u and prefactor psi of the lattice sums, as Laplace problems


def _generic_fields(rates, u):
    ta, tb, tc, td = rates
    la, lb, lc, ld, lu = (math.log(t) for t in (ta, tb, tc, td, u))

    def phi(t):
        x, y, z = t
        xz, yz = x + z, y + z
        return (xlogy(x, x) - x * (1 + lb) + xlogy(xz, xz) - xz * (1 + la)
                + xlogy(y, y) - y * (1 + ld) + xlogy(yz, yz) - yz * (1 + lc) - z * lu)

    def grad(t):
        x, y, z = t
        lxz, lyz = math.log(x + z), math.log(y + z)
        return np.array([
            math.log(x) - lb + lxz - la,
            math.log(y) - ld + lyz - lc,
            lxz - la + lyz - lc - lu,
        ])

    def hess(t):
        x, y, z = t
        p, q = 1.0 / (x + z), 1.0 / (y + z)
        return np.array([
            [1.0 / x + p, 0.0, p],
            [0.0, 1.0 / y + q, q],
            [p, q, p + q],
        ])

    def psi(t):
        x, y, z = t
        return 1.0 / np.sqrt(x * (x + z) * y * (y + z))

    return phi, grad, hess, psi


def _single_zero_fields(rates, u):
    ta, _, tc, td = rates
    la, lc, ld, lu = (math.log(t) for t in (ta, tc, td, u))

    def phi(t):
        x, y = t
        xy = x + y
        return (xlogy(x, x) - x * (1 + la) + xlogy(xy, xy) - xy * (1 + lc)
                + xlogy(y, y) - y * (1 + ld) - x * lu)

    def grad(t):
        x, y = t
        lxy = math.log(x + y)
        return np.array([math.log(x) - la + lxy - lc - lu, math.log(y) - ld + lxy - lc])

    def hess(t):
        x, y = t
        p = 1.0 / (x + y)
        return np.array([[1.0 / x + p, p], [p, 1.0 / y + p]])

    def psi(t):
        x, y = t
        return 1.0 / np.sqrt(x * (x + y) * y)

    return phi, grad, hess, psi


def _opposite_pair_fields(rates, u):
    ta, _, tc, _ = rates
    lk = math.log(ta * tc * u)

    def phi(t):
        x = t[0]
        return x * (2 * np.log(x) - 2 - lk)

    def grad(t):
        return np.array([2 * math.log(t[0]) - lk])

    def hess(t):
        return np.array([[2.0 / t[0]]])

    def psi(t):
        return 1.0 / t[0]

    return phi, grad, hess, psi


def phi_psi_fields(rates, u: float = 1.0):
    """``(phi_u, grad, hessian, psi, frame_rates, frame_u)`` for the lattice sum of ``G_n(u)``.

    Fields are expressed in the reduced frame used by :func:`saddle_point`.
    """
    rates, case = _non_dirac(rates)
    u = _check_u(u)
    frame, fu = _reduce(rates, u, case)
    if case.kind is Kind.GENERIC:
        fields = _generic_fields(frame, fu)
    elif case.kind is Kind.SINGLE_ZERO:
        fields = _single_zero_fields(frame, fu)
    else:
        fields = _opposite_pair_fields(frame, fu)
    return (*fields, frame, fu)


def default_box(saddle: SaddleData):
    """A box around the stationary point on which ``phi_u`` is finite everywhere.

    Only sets the domain; minimisers never see the stationary point itself.
    """
    if saddle.dimension == 3:
        x, y, z = saddle.x_star, saddle.y_star, saddle.z_star
        c = 0.5 * (min(x, y) + max(0.0, -z))
        zlo = 0.5 * (z - c)
        lower = np.array([c, c, zlo])
        upper = np.array([3 * x + 1, 3 * y + 1, z + 2 * (abs(z) + 1)])
        return lower, upper
    point = saddle.point
    return point / 4.0, 3.0 * point + 1.0


def laplace_problem(rates, u: float = 1.0, lower=None, upper=None, start=None,
                    analytic: bool = True) -> LaplaceProblem:
    """Laplace problem whose minimiser should be the closed-form saddle point."""
    phi, grad, hess, psi, _, _ = phi_psi_fields(rates, u)
    if lower is None or upper is None:
        box_lo, box_hi = default_box(saddle_point(rates, u))
        lower = box_lo if lower is None else lower
        upper = box_hi if upper is None else upper
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if start is None:
        # off-centre interior point
        start = lower + np.array([0.6, 0.35, 0.45][:len(lower)]) * (upper - lower)
    return LaplaceProblem(phi=phi, psi=psi, lower=lower, upper=upper, start=start,
                          grad=grad if analytic else None, hess=hess if analytic else None)
