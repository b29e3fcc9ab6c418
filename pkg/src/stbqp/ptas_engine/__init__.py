"""Objective evaluation, grid bounds, cone membership and error certificates."""

from .biquad import (
    DEFAULT_BUDGET,
    DEFAULT_TOLERANCE,
    BoundsReport,
    BudgetExceeded,
    MembershipResult,
    bounds,
    certify_shift,
    check_simplex,
    cone_membership,
    corrected_objective,
    default_workers,
    error_coefficients,
    evaluate_biquadratic,
    lower_bound,
    membership_expression,
    q_bar,
    q_bar_definitional,
    range_bound,
    upper_bound,
)
from .multi import (
    evaluate_multi,
    multi_bounds,
    multi_corrected_objective,
    tau,
    tau_bar,
)

__all__ = [
    "DEFAULT_BUDGET",
    "DEFAULT_TOLERANCE",
    "BoundsReport",
    "BudgetExceeded",
    "MembershipResult",
    "bounds",
    "certify_shift",
    "check_simplex",
    "cone_membership",
    "corrected_objective",
    "default_workers",
    "error_coefficients",
    "evaluate_biquadratic",
    "evaluate_multi",
    "lower_bound",
    "membership_expression",
    "multi_bounds",
    "multi_corrected_objective",
    "q_bar",
    "q_bar_definitional",
    "range_bound",
    "tau",
    "tau_bar",
    "upper_bound",
]
