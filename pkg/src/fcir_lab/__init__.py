"""fcir-lab: simulation and numerical analytics for the fractional
Cox-Ingersoll-Ross process, defined as the squared fractional
Ornstein-Uhlenbeck process absorbed at its first zero.

The package cross-checks three independent views of the same object:
exact-in-distribution path simulation, pathwise integral-sum residuals of
the defining SDE, and closed-form covariance/variance/bound formulas
evaluated by adaptive quadrature.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as kernel_backend
from .analytics import (
    BoundParams,
    QuadSpec,
    gamma_fn,
    j_cov,
    j_increment_var,
    j_var,
    ou_cov,
    ou_cov_asymptotic,
    ou_var,
    quad,
    sup_tail_bound,
    tau_bound,
    v_limit,
    vtsq_derivative,
)
from .fbm import (
    HurstIndex,
    SamplePath,
    Seed,
    TimeGrid,
    cholesky_fbm,
    circulant_fbm,
    fbm_cov,
    gaussian_stream,
)
from .fcir import FcirPath, ResidualReport, rs_left_sum, sde_residual, simulate_fcir, stratonovich_sum
from .fou import FouPath, HitResult, ModelParams, first_zero, integral_J, simulate_fou
from .mc import (
    HittingStudy,
    McEstimate,
    empirical_cov,
    estimate_hitting_prob,
    estimate_sup_tail,
    hitting_study,
)

__all__ = [
    "__version__",
    "kernel_backend",
    "HurstIndex", "TimeGrid", "SamplePath", "Seed",
    "fbm_cov", "gaussian_stream", "cholesky_fbm", "circulant_fbm",
    "ModelParams", "FouPath", "HitResult",
    "integral_J", "simulate_fou", "first_zero",
    "FcirPath", "ResidualReport",
    "simulate_fcir", "stratonovich_sum", "rs_left_sum", "sde_residual",
    "QuadSpec", "BoundParams",
    "quad", "gamma_fn", "ou_cov", "ou_var", "j_cov", "j_var",
    "j_increment_var", "v_limit", "vtsq_derivative",
    "sup_tail_bound", "tau_bound", "ou_cov_asymptotic",
    "McEstimate", "HittingStudy",
    "estimate_hitting_prob", "hitting_study", "estimate_sup_tail", "empirical_cov",
]
