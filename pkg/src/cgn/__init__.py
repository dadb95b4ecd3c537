"""
cgn: Gauss-Newton iteration for convex composite problems ``min h(F(x))``
with majorant-based semi-local convergence certificates.

The inner map ``F`` is a polynomial map with exact Jacobian, the outer
function ``h`` is polyhedral, and every norm is the infinity norm, so each
subproblem is a linear program solved by the bundled simplex code.
"""

from .errors import CGNError, DomainError, LPError, SchemaError, SubproblemError
from .lp import LinearProgram, LPStatus, make_lp, solve_lp
from .majorant import (
    AuxiliaryFunction,
    Custom,
    Lipschitz,
    Smale,
    custom_from_catalog,
    eval_aux,
    h3_condition,
    newton_map,
    scalar_sequence,
    smallest_zero,
)
from .outer import L1Deviation, LInfDeviation, MaxAffine, eval_h
from .polynomial import PolynomialMap, eval_F
from .problem import CompositeProblem
from .regularity import (
    Certificate,
    QuasiRegular,
    RegularPoint,
    Robinson,
    alpha_lower_bound,
    certify,
    check_regular_point,
    estimate_convex_process_inverse_norm,
    quasi_regular_bound_from_robinson,
    robinson_radius,
)
from .solver import RunReport, Termination, run, sample_lipschitz_constant, trace_csv, verify_majorization
from .subproblem import StepRule, distance_to_C, distance_to_DC, solve_linearized, solve_subproblem

__version__ = "0.1.0"
