"""Value function of the box-constrained problem.

For ``u >= -tau`` the value function is

    g(u) = min { ||A v - b||^2 : |v_j| <= u_j + tau_j },

so ``g(0)`` is the constrained optimum and ``-grad g(0)`` gives the
multipliers. ``h_G`` is the orthant-wise minimum at fixed ``u``, an upper
bound of ``g`` which ``g`` recovers after minimizing over ``v <= u``.

When ``A^T A`` is diagonal everything is explicit: with vertex
``c_j = |<b, a_j>| / ||a_j||^2 - tau_j``,

    g(u) = r + sum_j ||a_j||^2 (min(u_j, c_j) - c_j)^2,

where ``r = ||b - P b||^2`` is the part of ``b`` outside the column space
(zero whenever ``b`` lies in it, e.g. for square ``A``).
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from typing import IO, Optional, Sequence

import numpy as np

from .errors import ConvergenceError, InvalidInputError, SizeLimitError
from .model import Problem, as_vector, column_correlations, column_norms_sq
from .multipliers import DEFAULT_DIAG_TOL, check_diagonal_gram, diagonal_vertex
from .solvers import DEFAULT_CONFIG, SolverConfig, solve_box_ls

__all__ = [
    "MAX_ENUM_N",
    "h_g",
    "g_value",
    "DiagonalGeometry",
    "diagonal_g",
    "diagonal_g_gradient",
    "p_star_diagonal",
    "GridSpec",
    "export_g_grid",
    "write_grid_csv",
]

MAX_ENUM_N = 20
_CHUNK = 4096


def _check_domain(tau: np.ndarray, u: np.ndarray, strict: bool = False) -> None:
    bad = (u <= -tau) if strict else (u < -tau)
    if np.any(bad):
        j = int(np.flatnonzero(bad)[0])
        rel = ">" if strict else ">="
        raise InvalidInputError(f"u_{j} = {u[j]!r} must be {rel} -tau_{j} = {-tau[j]!r}", "u")


def h_g(p: Problem, u) -> float:
    """``min_S ||A S (u + tau) - b||^2`` over all ``2^n`` signatures ``S``.

    Exhaustive, so limited to ``n <= MAX_ENUM_N``.
    """
    u = as_vector(u, p.n, "u")
    _check_domain(p.tau, u)
    if p.n > MAX_ENUM_N:
        raise SizeLimitError(f"h_G enumerates 2^n signatures; n <= {MAX_ENUM_N} required, got {p.n}", n=p.n)
    radius = u + p.tau
    bits = np.arange(p.n)
    best = np.inf
    total = 1 << p.n
    for start in range(0, total, _CHUNK):
        masks = np.arange(start, min(start + _CHUNK, total))
        signs = 1.0 - 2.0 * ((masks[:, None] >> bits) & 1)
        res = (signs * radius) @ p.a.T - p.b
        best = min(best, float(np.min(np.einsum("ij,ij->i", res, res))))
    return best


def g_value(p: Problem, u, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """``g(u)`` by solving the box problem with radii ``u + tau``.

    Raises
    ------
    ConvergenceError
        If the box solver does not converge.
    """
    u = as_vector(u, p.n, "u")
    _check_domain(p.tau, u)
    res = solve_box_ls(p.with_tau(np.maximum(u + p.tau, 0.0)), cfg)
    if not res.converged:
        raise ConvergenceError(f"box solver did not converge in {res.iterations} iterations", res)
    return res.objective


@dataclass(frozen=True)
class DiagonalGeometry:
    """Closed-form data of a problem whose columns are pairwise orthogonal.

    ``floor`` is the squared distance from ``b`` to the column space, the
    value ``g`` attains once every box contains the unconstrained fit.
    """

    c: np.ndarray
    col_norms_sq: np.ndarray
    tau: np.ndarray
    floor: float = 0.0

    @classmethod
    def from_problem(cls, p: Problem, diag_tol: float = DEFAULT_DIAG_TOL) -> "DiagonalGeometry":
        ratio, pair = check_diagonal_gram(p.a)
        if ratio > diag_tol:
            raise InvalidInputError(
                f"A^T A is not diagonal (columns {pair}, relative inner product {ratio:.3g})", "A"
            )
        norms = column_norms_sq(p.a)
        if np.any(norms == 0):
            j = int(np.flatnonzero(norms == 0)[0])
            raise InvalidInputError(f"column {j} is zero; drop zero columns first", "A")
        corr = column_correlations(p.a, p.b)
        fit = p.b - p.a @ (corr / norms)
        floor = math.fsum(fit * fit)
        return cls(diagonal_vertex(norms, corr, p.tau), norms, p.tau.copy(), floor)

    @property
    def n(self) -> int:
        return self.c.shape[0]

    def projection(self, u) -> np.ndarray:
        """``(P u)_j = min(c_j, u_j)``."""
        return np.minimum(self.c, np.asarray(u, dtype=np.float64))


def diagonal_g(geo: DiagonalGeometry, u) -> float:
    u = as_vector(u, geo.n, "u")
    _check_domain(geo.tau, u)
    d = geo.projection(u) - geo.c
    return geo.floor + float(np.sum(geo.col_norms_sq * d * d))


def diagonal_g_gradient(geo: DiagonalGeometry, u) -> np.ndarray:
    """``dg/du_j = 2 ||a_j||^2 (u_j - c_j)`` where ``u_j <= c_j``, else 0.

    Defined on the open domain ``u > -tau``.
    """
    u = as_vector(u, geo.n, "u")
    _check_domain(geo.tau, u, strict=True)
    return np.where(u <= geo.c, 2.0 * geo.col_norms_sq * (u - geo.c), 0.0)


def p_star_diagonal(geo: DiagonalGeometry) -> float:
    """Constrained optimum ``g(0) = r + sum_j ||a_j||^2 max(c_j, 0)^2``."""
    active = geo.c >= 0
    return geo.floor + float(np.sum(geo.col_norms_sq[active] * geo.c[active] ** 2))


# -- grid export ---------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Grid over one or two coordinates of ``u``; the others stay at ``base``."""

    axes: tuple[int, ...]
    lo: float
    hi: float
    step: float
    base: Optional[Sequence[float]] = None

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2 or len(set(self.axes)) != len(self.axes):
            raise InvalidInputError("need one or two distinct axes", "axes")
        if not self.step > 0:
            raise InvalidInputError(f"step must be > 0, got {self.step!r}", "step")
        if not self.hi >= self.lo:
            raise InvalidInputError(f"empty range {self.lo!r}:{self.hi!r}", "range")

    def values(self) -> np.ndarray:
        count = int(np.floor((self.hi - self.lo) / self.step + 1e-9)) + 1
        vals = self.lo + self.step * np.arange(count)
        # snap rounding residue so that a grid through the origin hits u = 0
        vals[np.abs(vals) <= 1e-9 * self.step] = 0.0
        return vals


def export_g_grid(
    p: Problem,
    spec: GridSpec,
    cfg: SolverConfig = DEFAULT_CONFIG,
    diag_tol: float = DEFAULT_DIAG_TOL,
) -> list[tuple[float, ...]]:
    """Rows ``(u_i[, u_j], g(u))`` in grid order (first axis outermost).

    Uses the closed form when ``A^T A`` is diagonal with no zero column,
    otherwise solves a box problem per grid point.
    """
    for ax in spec.axes:
        if not 0 <= ax < p.n:
            raise InvalidInputError(f"axis {ax} out of range for n = {p.n}", "axes")
    base = np.zeros(p.n) if spec.base is None else np.array(as_vector(spec.base, p.n, "base"))
    vals = spec.values()
    for ax in spec.axes:
        if vals[0] < -p.tau[ax]:
            raise InvalidInputError(f"range starts below -tau_{ax} = {-p.tau[ax]!r}", "range")
    _check_domain(p.tau, base)

    try:
        geo = DiagonalGeometry.from_problem(p, diag_tol)
    except InvalidInputError:
        geo = None

    rows = []
    for point in itertools.product(vals, repeat=len(spec.axes)):
        u = base.copy()
        u[list(spec.axes)] = point
        g = diagonal_g(geo, u) if geo is not None else g_value(p, u, cfg)
        rows.append(tuple(float(v) for v in point) + (g,))
    return rows


def write_grid_csv(rows, axes: Sequence[int], fh: IO[str]) -> None:
    """CSV with header ``u_i[,u_j],g``; floats with 17 significant digits."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow([f"u_{ax}" for ax in axes] + ["g"])
    for row in rows:
        writer.writerow([f"{v:.17g}" for v in row])
