"""Closed-form Lagrange multipliers for box-constrained least squares.

A problem ``min ||Ax - b||^2  s.t. |x_j| <= tau_j`` is equivalent to the
weighted LASSO ``min ||Ax - b||^2 + sum_j lam_j |x_j|`` for suitable
``lam >= 0``. This package computes such ``lam`` in closed form when the
design allows it, certifies them numerically, and applies them to
denoising.
"""

__version__ = "0.1.0"

from .errors import (
    BoxLassoError,
    ConvergenceError,
    InapplicableError,
    InvalidInputError,
    SingularSystemError,
    SizeLimitError,
)
from .model import Problem, Signature, SolveResult, is_feasible
from .multipliers import (
    MultiplierMethod,
    MultiplierResult,
    auto_multipliers,
    diagonal_multipliers,
    gradient_sign_multipliers,
    gradient_sign_with_signature,
    reduce_zero_tau,
    scalar_multiplier,
)
from .solvers import SolverConfig, solve_box_ls, solve_weighted_lasso, solve_weighted_tikhonov
from .verify import VerifyReport, verify_equivalence

__all__ = [
    "BoxLassoError",
    "ConvergenceError",
    "InapplicableError",
    "InvalidInputError",
    "SingularSystemError",
    "SizeLimitError",
    "Problem",
    "Signature",
    "SolveResult",
    "is_feasible",
    "MultiplierMethod",
    "MultiplierResult",
    "auto_multipliers",
    "diagonal_multipliers",
    "gradient_sign_multipliers",
    "gradient_sign_with_signature",
    "reduce_zero_tau",
    "scalar_multiplier",
    "SolverConfig",
    "solve_box_ls",
    "solve_weighted_lasso",
    "solve_weighted_tikhonov",
    "VerifyReport",
    "verify_equivalence",
]
