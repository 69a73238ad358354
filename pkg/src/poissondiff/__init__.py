"""Exact and asymptotic analysis of ``X_n = (A_n - B_n | A_n - B_n = C_n - D_n)``."""
from .core import (
    CaseClass, Kind, Orientation, Rates, RatesError, ScaledIntensities, classify, orient, scale,
)
from .exact import (
    ConditionalDistribution, GnValue, MomentEstimate, conditional_pmf, evaluate_gn,
    exact_moments, normalized_kolmogorov_distance, skellam_log_pmf,
)
from .asymptotics import (
    AdmissibilityError, AsymptoticMoments, QuasiPowersPair, SaddleData, gamma_of_u,
    gn_asymptote, laplace_problem, moment_expansion, quasi_powers, saddle_point,
)
from .laplace import LaplaceAsymptote, LaplaceProblem, asymptote, direct_lattice_sum, minimize

__version__ = "0.1.0"
