"""Spectral Gevrey-regularity toolkit for the 2D periodic Navier-Stokes
equations: exact spectral operators, Gevrey norms and class diagnostics,
the recursive a-priori bound chain, the complex-time power-series criterion
for attractor membership of zero, and its closed-form eigenmode-forcing
resolution."""

__version__ = "0.1.0"

from .spectral import (Dealias, GridSpec, SpectralField, bilinear_advect,
                       field_from_modes, inner_product, leray_project,
                       random_solenoidal_field, stokes_apply, zero_field)
from .gevrey import (GevreyWeight, apply_weight, fit_growth_certificate,
                     frechet_distance, gevrey_norm)
from .bounds import BoundSet, bound_chain, grashof, sobolev_radius_log
from .taylor import (ConformalMap, TaylorSeries, Verdict, criterion_verdict,
                     evaluate_series, ode_residual, radius_estimate,
                     taylor_coefficients)
from .kolmogorov import eigen_force, equilibrium_verdict, scalar_series
from .dynamics import BlowUpError, IntegratorConfig, integrate, step

__all__ = [
    "Dealias", "GridSpec", "SpectralField", "bilinear_advect",
    "field_from_modes", "inner_product", "leray_project",
    "random_solenoidal_field", "stokes_apply", "zero_field",
    "GevreyWeight", "apply_weight", "fit_growth_certificate",
    "frechet_distance", "gevrey_norm",
    "BoundSet", "bound_chain", "grashof", "sobolev_radius_log",
    "ConformalMap", "TaylorSeries", "Verdict", "criterion_verdict",
    "evaluate_series", "ode_residual", "radius_estimate",
    "taylor_coefficients",
    "eigen_force", "equilibrium_verdict", "scalar_series",
    "BlowUpError", "IntegratorConfig", "integrate", "step",
    "__version__",
]
