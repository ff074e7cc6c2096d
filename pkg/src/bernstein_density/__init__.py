"""Nonparametric density estimation with Bernstein polynomial (beta mixture) models."""
__version__ = "0.1.0"

from .basis import elevate_degree, eval_basis, eval_basis_cdf
from .baselines import KernelConfig, ecdf, kde, silverman_bandwidth, vitale_cdf
from .degree import (DegreeGrid, DegreeSelection, changepoint_select, lower_bound_mb,
                     profile_loglik, select_degree)
from .estimator import BernsteinDensity
from .exceptions import DomainError, InfeasibleModelError
from .fit import FitConfig, FitResult, apply_symmetry, em_fit, init_weights
from .model import BernsteinModel, cdf, loglik, mean_estimate, moment_estimate, pdf
from .transform import SupportMap, choose_support, from_unit, to_unit

__all__ = [
    "BernsteinDensity", "BernsteinModel", "DegreeGrid", "DegreeSelection", "DomainError",
    "FitConfig", "FitResult", "InfeasibleModelError", "KernelConfig", "SupportMap",
    "apply_symmetry", "cdf", "changepoint_select", "choose_support", "ecdf", "elevate_degree",
    "em_fit", "eval_basis", "eval_basis_cdf", "from_unit", "init_weights", "kde", "loglik",
    "lower_bound_mb", "mean_estimate", "moment_estimate", "pdf", "profile_loglik",
    "select_degree", "silverman_bandwidth", "to_unit", "vitale_cdf",
]
