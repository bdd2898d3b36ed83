"""Exact and numerical verification of moment formulas for DT-operators.

Submodules
----------
exact       rational polynomials and truncated power series
moments     moment polynomial recursions and their closed forms
spectral    Lambert-type function ``rho``, generating functions, free cumulants
hankel      exact determinant identities
fixedpoint  operator-valued fixed points on a grid
eigen       Hessenberg + QR eigenvalue solver
randmat     random-matrix samplers and Monte-Carlo harness
brown       empirical spectra, Brown density, log-energy, entropy bound
acceptance  the acceptance battery
cli         ``dtmoments`` command line
"""

from __future__ import annotations

from .brown import (
    brown_grid_density,
    brown_radial_check,
    disk_radius,
    entropy_bound,
    log_energy_mc,
    log_energy_target,
)
from .eigen import eigenvalues, hessenberg
from .errors import ConfigurationError, ConvergenceError, DomainError, SingularityError
from .exact import ExactPoly, TruncatedSeries, as_fraction, fraction_from_str, fraction_to_str
from .fixedpoint import build_w, check_fixed_point, check_s_fixed_point
from .hankel import check_condensation, check_lemma57, delta_poly, det_exact
from .moments import f_polys, p_polys, q_polys, sniady_closed, tau_tlambda_closed
from .randmat import McEstimate, resolvent_norm_checks, word_moment_mc
from .report import CheckReport
from .spectral import coefficient_family, free_cumulants_from_moments, genfun_check, rho, rtransform_taylor_tlambda

__version__ = "0.1.0"

__all__ = [
    "CheckReport",
    "ConfigurationError",
    "ConvergenceError",
    "DomainError",
    "ExactPoly",
    "McEstimate",
    "SingularityError",
    "TruncatedSeries",
    "as_fraction",
    "brown_grid_density",
    "brown_radial_check",
    "build_w",
    "check_condensation",
    "check_fixed_point",
    "check_lemma57",
    "check_s_fixed_point",
    "coefficient_family",
    "delta_poly",
    "det_exact",
    "disk_radius",
    "eigenvalues",
    "entropy_bound",
    "f_polys",
    "fraction_from_str",
    "fraction_to_str",
    "free_cumulants_from_moments",
    "genfun_check",
    "hessenberg",
    "log_energy_mc",
    "log_energy_target",
    "p_polys",
    "q_polys",
    "resolvent_norm_checks",
    "rho",
    "rtransform_taylor_tlambda",
    "sniady_closed",
    "tau_tlambda_closed",
    "word_moment_mc",
]
