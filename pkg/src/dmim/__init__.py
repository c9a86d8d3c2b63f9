"""Differential message importance measure of continuous densities.

The measure of a density f is the integral of f * exp(-f) over its support,
always in [0, 1]. This package provides closed forms, a power-integral series
engine, adaptive quadrature, normal-density asymptotics, a distribution-free
sample-size planner with Kolmogorov-Smirnov guarantees, and a seeded Monte
Carlo harness that validates the guarantees empirically.
"""

from .core import (
    DmimEstimate, QuadratureConfig, SeriesConfig, density_sup, dmim_auto,
    dmim_closed_form, dmim_quadrature, dmim_series, dmim_via_renyi,
    power_integral, quantized_mim_sum, remainder_bound, renyi_entropy,
)
from .distributions import (
    Beta, Custom, Distribution, Exponential, Gamma, Interval, Laplace,
    Nakagami, Normal, Uniform, from_json,
)
from .errors import (
    DivergentIntegralError, DmimError, MissingVarianceError, NoClosedFormError,
    NonConvergenceError, QuadratureError, UnboundedTailError,
    UnsupportedOperationError,
)
from .normal_asym import NormalApprox, l_hat, l_tilde1, l_tilde2, n_zero
from .planner import (
    GammaCurve, Plan, beta_from, d_from, epsilon_from, gamma_limit,
    gamma_ratio, ks_tail_series, ks_tail_upper_bound, make_plan,
    required_samples,
)
from .simulate import (
    EmpiricalCdf, KsResult, McConfig, McReport, ecdf, fit_curve,
    ks_statistic, mc_error_probability, reproduce_table2,
)

__version__ = "0.1.0"
