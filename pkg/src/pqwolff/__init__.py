"""Numerical toolkit for Wolff potentials of (p,q)-growth N-functions and the
sublinear measure-data problem -Delta_G u = sigma g(u^gamma)."""

__version__ = "0.1.0"

from .errors import DomainError, PqWolffError, RegimeError, UnsupportedMeasureError
from .orlicz import (NFunction, SublinearLaw, G_eval, G_star, F_eval, f_eval, g_eval, g_inv,
                     check_growth_envelopes, delta2_ratio, gamma_admissible, gamma_upper)
from .measure import Measure, Multiplier, RadialDensity, integrate_radial, shell_cap_fraction, sphere_area
from .wolff import (DEFAULT, RadialProfile, WolffConfig, evaluate, log_grid, truncated_series,
                    wolff_p_point, wolff_p_radial_profile, wolff_point, wolff_radial_profile)
from .bounds import (ConstantsBundle, displayed_limit_constant, epsilon0, lambda_const, log_lambda_const, recursion_limits,
                     verify_lambda_inequality, verify_lower_bound, verify_sandwich,
                     verify_truncated_center_bound)
from .fixedpoint import IterationConfig, IterationReport, f_modular, residual, solve
from .conditions import (Verdict, check_consolidated, check_necessary, check_sufficient,
                         weighted_potential_inequality_check, modular_of_power)

__all__ = [name for name in dir() if not name.startswith("_")]
