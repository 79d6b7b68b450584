"""Manufactured solutions, truncation errors and convergence studies."""

from .convergence import (
    ConvergenceReport,
    StudyAborted,
    convergence_study,
    format_float,
    max_norm_error,
    solve_example,
)
from .exact import (
    DEFAULT_KAPPA_MINUS,
    ExactSolutionSpec,
    SeparableTerm,
    SinPoly,
    builtin_example,
    solution_from_terms,
    check_jump_conditions,
    check_source_consistency,
)
from .truncation import (
    TruncationCoefficients,
    class_masks,
    first_order_factor,
    interior_coefficient,
    residual_order_ratios,
    truncation_coefficients,
    truncation_residual,
)

__all__ = [
    "ConvergenceReport",
    "StudyAborted",
    "convergence_study",
    "format_float",
    "max_norm_error",
    "solve_example",
    "DEFAULT_KAPPA_MINUS",
    "ExactSolutionSpec",
    "SeparableTerm",
    "SinPoly",
    "builtin_example",
    "solution_from_terms",
    "check_jump_conditions",
    "check_source_consistency",
    "TruncationCoefficients",
    "class_masks",
    "first_order_factor",
    "interior_coefficient",
    "residual_order_ratios",
    "truncation_coefficients",
    "truncation_residual",
]
