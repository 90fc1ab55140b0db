"""Certificates that a multiplier vector makes the constrained and the
penalized problems equivalent.

Two independent checks are reported: the duality gap ``p* - H(lam)`` (zero
exactly when ``lam`` is optimal for the dual) and the first-order optimality
residual of the weighted LASSO at the constrained minimizer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .model import Problem, as_matrix, as_multipliers, as_vector
from .solvers import DEFAULT_CONFIG, SolverConfig, solve_box_ls, solve_weighted_lasso

__all__ = [
    "VerifyReport",
    "lagrangian",
    "dual_value",
    "kkt_residuals",
    "verify_equivalence",
    "DEFAULT_ZERO_TOL",
    "SOLUTIONS_CLOSE_TOL",
]

DEFAULT_ZERO_TOL = 1e-8
SOLUTIONS_CLOSE_TOL = 1e-5


@dataclass(frozen=True)
class VerifyReport:
    p_star: float
    dual_value: float
    gap: float
    kkt_residuals: np.ndarray
    max_kkt_residual: float
    x_constrained: np.ndarray
    x_penalized: np.ndarray
    solutions_close: bool

    def passed(self, gap_tol: float = 1e-6, kkt_tol: float = 1e-6) -> bool:
        return self.gap <= gap_tol and self.max_kkt_residual <= kkt_tol

    def to_dict(self) -> dict:
        return {
            "p_star": float(self.p_star),
            "dual_value": float(self.dual_value),
            "gap": float(self.gap),
            "kkt_residuals": np.asarray(self.kkt_residuals).tolist(),
            "max_kkt_residual": float(self.max_kkt_residual),
            "x_constrained": np.asarray(self.x_constrained).tolist(),
            "x_penalized": np.asarray(self.x_penalized).tolist(),
            "solutions_close": bool(self.solutions_close),
        }


def lagrangian(p: Problem, x, lam) -> float:
    """``||Ax - b||^2 + sum_j lam_j (|x_j| - tau_j)``."""
    x = as_vector(x, p.n, "x")
    lam = as_multipliers(lam, p.n)
    return p.objective(x) + float(lam @ (np.abs(x) - p.tau))


def dual_value(p: Problem, lam, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """``H(lam) = min_x L(x, lam)``, via the weighted LASSO solver."""
    lam = as_multipliers(lam, p.n)
    res = solve_weighted_lasso(p.a, p.b, lam, cfg)
    if not res.converged:
        raise ConvergenceError(f"weighted LASSO did not converge in {res.iterations} sweeps", res)
    return res.objective - float(lam @ p.tau)


def kkt_residuals(a, b, lam, x, zero_tol: float = DEFAULT_ZERO_TOL) -> np.ndarray:
    """Distance of 0 from the subdifferential of ``||Ax-b||^2 + sum lam_j |x_j|``.

    With ``g = 2 A^T (Ax - b)``: ``|g_j + lam_j sign(x_j)|`` where
    ``|x_j| > zero_tol``, otherwise ``max(|g_j| - lam_j, 0)``.
    """
    a = as_matrix(a)
    m, n = a.shape
    b = as_vector(b, m, "b")
    lam = as_multipliers(lam, n)
    x = as_vector(x, n, "x")
    g = 2.0 * (a.T @ (a @ x - b))
    nonzero = np.abs(x) > zero_tol
    return np.where(nonzero, np.abs(g + lam * np.sign(x)), np.maximum(np.abs(g) - lam, 0.0))


def verify_equivalence(
    p: Problem,
    result,
    cfg: SolverConfig = DEFAULT_CONFIG,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> VerifyReport:
    """Solve both formulations and certify the multipliers.

    ``result`` is a :class:`~boxlasso.multipliers.MultiplierResult` or a bare
    multiplier vector. The KKT residual at the constrained minimizer is the
    authoritative check; ``solutions_close`` can be false when the penalized
    problem has several minimizers.
    """
    lam = as_multipliers(getattr(result, "lam", result), p.n)
    box = solve_box_ls(p, cfg)
    if not box.converged:
        raise ConvergenceError(f"box solver did not converge in {box.iterations} iterations", box)
    pen = solve_weighted_lasso(p.a, p.b, lam, cfg)
    if not pen.converged:
        raise ConvergenceError(f"weighted LASSO did not converge in {pen.iterations} sweeps", pen)
    h = pen.objective - float(lam @ p.tau)
    res = kkt_residuals(p.a, p.b, lam, box.x, zero_tol)
    return VerifyReport(
        p_star=box.objective,
        dual_value=h,
        gap=box.objective - h,
        kkt_residuals=res,
        max_kkt_residual=float(np.max(res)),
        x_constrained=box.x,
        x_penalized=pen.x,
        solutions_close=bool(np.max(np.abs(box.x - pen.x)) <= SOLUTIONS_CLOSE_TOL),
    )
