"""Deterministic solvers for the three formulations handled by the package.

* :func:`solve_box_ls` -- projected gradient for ``min ||Ax-b||^2`` over a box,
* :func:`solve_weighted_lasso` -- cyclic coordinate descent for
  ``min ||Ax-b||^2 + sum_j lam_j |x_j|``,
* :func:`solve_weighted_tikhonov` -- the normal equations of
  ``min ||Ax-b||^2 + sum_j lam_j x_j^2``.

The fidelity is ``||Ax - b||^2`` without a factor one half throughout, so the
soft threshold of coordinate ``j`` is ``lam_j / (2 ||a_j||^2)``.

All iterative solvers start from ``x = 0`` and never raise on
non-convergence; they report ``converged=False`` instead.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.linalg import solve_triangular

from .errors import InvalidInputError, SingularSystemError
from .model import Problem, SolveResult, as_matrix, as_multipliers, as_vector, clamp, column_norms_sq

__all__ = [
    "SolverConfig",
    "soft_threshold",
    "solve_box_ls",
    "solve_weighted_lasso",
    "solve_weighted_tikhonov",
    "dense_spd_solve",
    "lasso_objective",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    """Stopping rules shared by the iterative solvers.

    ``tol`` bounds the infinity-norm change between successive iterates;
    ``step_shrink`` is the backtracking factor of the projected gradient
    line search.
    """

    max_iters: int = 100_000
    tol: float = 1e-10
    step_shrink: float = 0.5

    def __post_init__(self):
        if isinstance(self.max_iters, bool) or int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise InvalidInputError("must be a positive integer", "max_iters")
        if not self.tol > 0:
            raise InvalidInputError("must be > 0", "tol")
        if not 0 < self.step_shrink < 1:
            raise InvalidInputError("must lie in (0, 1)", "step_shrink")


DEFAULT_CONFIG = SolverConfig()


def soft_threshold(v, theta):
    """``sign(v) * max(|v| - theta, 0)``; exactly zero at the kink."""
    v = np.asarray(v, dtype=np.float64)
    return np.sign(v) * np.maximum(np.abs(v) - theta, 0.0)


def lasso_objective(a: np.ndarray, b: np.ndarray, lam: np.ndarray, x: np.ndarray) -> float:
    r = a @ x - b
    return float(r @ r + lam @ np.abs(x))


def solve_box_ls(p: Problem, cfg: SolverConfig = DEFAULT_CONFIG) -> SolveResult:
    """Minimize ``||Ax - b||^2`` subject to ``|x_j| <= tau_j``.

    Projected gradient with a backtracking line search on the quadratic
    upper-bound condition. The projection is the last operation of every
    iteration, so the returned ``x`` is exactly feasible. Coordinates with
    ``tau_j = 0`` stay pinned at zero.
    """
    a, b, tau = p.a, p.b, p.tau
    free = tau > 0
    x = np.zeros(p.n)

    def f(z):
        r = a @ z - b
        return float(r @ r)

    lipschitz = 2.0 * np.linalg.norm(a, 2) ** 2
    if lipschitz == 0.0 or not np.any(free):
        return SolveResult(x, f(x), 0, True, cfg.tol)

    t = 1.0 / lipschitz
    fx = f(x)
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        grad = 2.0 * (a.T @ (a @ x - b))
        grad[~free] = 0.0
        t = t / cfg.step_shrink
        while True:
            x_new = clamp(x - t * grad, tau)
            d = x_new - x
            f_new = f(x_new)
            # t <= 1/L satisfies the bound analytically; skip the test there
            if t * lipschitz <= 1.0 or f_new <= fx + grad @ d + (d @ d) / (2.0 * t):
                break
            t *= cfg.step_shrink
        change = float(np.max(np.abs(d)))
        x, fx = x_new, f_new
        if change <= cfg.tol:
            converged = True
            break
    if not converged:
        logger.warning("solve_box_ls: no convergence after %d iterations", it)
    return SolveResult(x, f(x), it, converged, cfg.tol)


def solve_weighted_lasso(
    a,
    b,
    lam,
    cfg: SolverConfig = DEFAULT_CONFIG,
    callback: Optional[Callable[[int, np.ndarray, float], None]] = None,
) -> SolveResult:
    """Minimize ``||Ax - b||^2 + sum_j lam_j |x_j|`` by cyclic coordinate descent.

    Each coordinate update is the exact one-dimensional minimizer

        x_j <- soft(rho_j / ||a_j||^2, lam_j / (2 ||a_j||^2)),

    with ``rho_j = <a_j, b - sum_{k != j} a_k x_k>``. Zero columns keep
    ``x_j = 0``. Coordinates are swept in index order; iteration stops when
    a full sweep moves no coordinate by more than ``cfg.tol``.

    Parameters
    ----------
    a : (m, n) array_like
    b : (m,) array_like
    lam : (n,) array_like
        Nonnegative weights.
    cfg : SolverConfig
    callback : callable, optional
        Called after every sweep as ``callback(sweep, x, objective)``.

    Returns
    -------
    SolveResult
        ``objective`` is the penalized objective at ``x``. When ``A`` has a
        nontrivial kernel the minimizer need not be unique; the one returned
        depends on the sweep order.
    """
    a = as_matrix(a)
    m, n = a.shape
    b = as_vector(b, m, "b")
    lam = as_multipliers(lam, n)

    norms = column_norms_sq(a)
    x = np.zeros(n)
    r = b.copy()  # residual b - Ax
    converged = False
    sweep = 0
    for sweep in range(1, cfg.max_iters + 1):
        change = 0.0
        for j in range(n):
            if norms[j] == 0.0:
                continue
            aj = a[:, j]
            old = x[j]
            rho = aj @ r + norms[j] * old
            new = float(soft_threshold(rho / norms[j], lam[j] / (2.0 * norms[j])))
            if new != old:
                r -= aj * (new - old)
                x[j] = new
                change = max(change, abs(new - old))
        if callback is not None:
            callback(sweep, x.copy(), lasso_objective(a, b, lam, x))
        if change <= cfg.tol:
            converged = True
            break
    if not converged:
        logger.warning("solve_weighted_lasso: no convergence after %d sweeps", sweep)
    return SolveResult(x, lasso_objective(a, b, lam, x), sweep, converged, cfg.tol)


def dense_spd_solve(mat, rhs) -> np.ndarray:
    """Solve ``mat @ y = rhs`` for a symmetric positive definite ``mat``.

    Cholesky factorization followed by one step of iterative refinement.

    Raises
    ------
    SingularSystemError
        If ``mat`` is not symmetric to 1e-12 (relative to its largest entry),
        not positive definite, or has a Cholesky pivot below
        ``1e-14 * max(diag(mat))``.
    """
    mat = as_matrix(mat, "mat")
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise InvalidInputError(f"expected a square matrix, got {mat.shape}", "mat")
    rhs = as_vector(rhs, n, "rhs")
    scale = max(1.0, float(np.max(np.abs(mat))))
    asym = float(np.max(np.abs(mat - mat.T)))
    if asym > 1e-12 * scale:
        raise SingularSystemError(f"matrix is not symmetric (max |M - M^T| = {asym:.3g})")
    sym = 0.5 * (mat + mat.T)
    try:
        low = np.linalg.cholesky(sym)
    except np.linalg.LinAlgError:
        raise SingularSystemError("matrix is not positive definite") from None
    pivots = np.diag(low) ** 2
    max_diag = float(np.max(np.diag(sym)))
    if np.any(pivots <= 1e-14 * max_diag):
        j = int(np.argmin(pivots))
        raise SingularSystemError(f"singular system: Cholesky pivot {j} is {pivots[j]:.3g}")

    def chol_solve(v):
        return solve_triangular(low.T, solve_triangular(low, v, lower=True), lower=False)

    y = chol_solve(rhs)
    y = y + chol_solve(rhs - sym @ y)
    return y


def solve_weighted_tikhonov(a, b, lam) -> np.ndarray:
    """Minimizer of ``||Ax - b||^2 + sum_j lam_j x_j^2``.

    Solves ``(A^T A + diag(lam)) x = A^T b``. The system is nonsingular when
    every ``lam_j > 0`` or ``A`` has full column rank.
    """
    a = as_matrix(a)
    m, n = a.shape
    b = as_vector(b, m, "b")
    lam = as_multipliers(lam, n)
    gram = a.T @ a
    gram = 0.5 * (gram + gram.T)
    return dense_spd_solve(gram + np.diag(lam), a.T @ b)
