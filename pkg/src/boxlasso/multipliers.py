"""Closed-form Lagrange multipliers for box-constrained least squares.

Given ``min ||Ax - b||^2  s.t. |x_j| <= tau_j``, every function here returns a
nonnegative vector ``lam`` such that the constrained minimizer also minimizes
the weighted LASSO objective ``||Ax - b||^2 + sum_j lam_j |x_j|``.

Available closed forms:

* one unknown: ``lam = 2 a^2 (|b / a| - tau)^+``,
* pairwise orthogonal columns (diagonal ``A^T A``):
  ``lam_j = 2 ||a_j||^2 (|<b, a_j>| / ||a_j||^2 - tau_j)^+``,
* gradient sign condition (``grad f <= 0`` on the whole box):
  ``lam = 2 A^T (b - A tau)``,
* the same after a change of orthant ``x -> S x``:
  ``lam = 2 S A^T (b - A S tau)``.

Coordinates with ``tau_j = 0`` are removed before any formula is applied
and receive the smallest multiplier that keeps ``x_j = 0`` optimal, namely
``2 |<a_j, b - A x*>|`` where ``x*`` is the constrained minimizer (known in
closed form for every method).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InapplicableError, InvalidInputError, SizeLimitError
from .model import Problem, Signature, as_multipliers, column_correlations, column_norms_sq, gram_matrix

__all__ = [
    "MultiplierMethod",
    "MultiplierResult",
    "ZeroTauReduction",
    "reduce_zero_tau",
    "scalar_multiplier",
    "diagonal_multipliers",
    "gradient_sign_multipliers",
    "gradient_sign_with_signature",
    "auto_multipliers",
    "check_diagonal_gram",
    "DEFAULT_DIAG_TOL",
    "MAX_SIGNATURE_N",
]

DEFAULT_DIAG_TOL = 1e-10
MAX_SIGNATURE_N = 20


class MultiplierMethod(str, enum.Enum):
    SCALAR = "scalar"
    DIAGONAL_GRAM = "diagonal_gram"
    GRADIENT_SIGN = "gradient_sign"
    GRADIENT_SIGN_WITH_SIGNATURE = "gradient_sign_with_signature"


@dataclass(frozen=True)
class MultiplierResult:
    """Multipliers plus how they were obtained.

    ``condition_margin`` is the smallest slack in the method's
    applicability condition; it is never negative on a returned result.
    ``x_star`` is the constrained minimizer implied by the closed form.
    """

    lam: np.ndarray
    method: MultiplierMethod
    signature: Optional[Signature]
    condition_margin: float
    x_star: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "lam", as_multipliers(self.lam))
        if self.condition_margin < 0:
            raise InvalidInputError("condition margin must be >= 0", "condition_margin")

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam.tolist(),
            "method": self.method.value,
            "signature": None if self.signature is None else self.signature.to_list(),
            "condition_margin": float(self.condition_margin),
        }


# -- reduction of zero radii ---------------------------------------------------


@dataclass(frozen=True)
class ZeroTauReduction:
    """Problem restricted to the coordinates with ``tau_j != 0``.

    ``kept`` lists the original indices of the retained coordinates, in
    increasing order. ``reduced`` is ``None`` when every radius is zero.
    """

    original: Problem
    reduced: Optional[Problem]
    kept: tuple[int, ...]

    @property
    def dropped(self) -> tuple[int, ...]:
        keep = set(self.kept)
        return tuple(j for j in range(self.original.n) if j not in keep)

    @property
    def is_identity(self) -> bool:
        return len(self.kept) == self.original.n

    def embed(self, v, fill: float = 0.0) -> np.ndarray:
        """Re-embed a reduced-space vector; dropped coordinates get ``fill``."""
        out = np.full(self.original.n, float(fill))
        if self.kept:
            out[list(self.kept)] = np.asarray(v, dtype=np.float64)
        return out


def reduce_zero_tau(p: Problem) -> ZeroTauReduction:
    """Drop coordinates whose radius is zero (they are pinned at ``x_j = 0``)."""
    kept = tuple(int(j) for j in np.flatnonzero(p.tau != 0))
    if len(kept) == p.n:
        return ZeroTauReduction(p, p, kept)
    if not kept:
        return ZeroTauReduction(p, None, kept)
    idx = list(kept)
    return ZeroTauReduction(p, Problem(p.a[:, idx], p.b, p.tau[idx]), kept)


def _finish(red: ZeroTauReduction, lam_reduced, x_reduced, method, signature, margin) -> MultiplierResult:
    """Re-embed a reduced result and price the dropped coordinates."""
    p = red.original
    x_star = red.embed(x_reduced) if red.kept else np.zeros(p.n)
    lam = red.embed(lam_reduced) if red.kept else np.zeros(p.n)
    dropped = list(red.dropped)
    if dropped:
        residual = p.b - p.a @ x_star
        lam[dropped] = 2.0 * np.abs(column_correlations(p.a[:, dropped], residual))
        if signature is not None:
            full = np.ones(p.n)
            full[list(red.kept)] = signature.as_array()
            signature = Signature(full)
    return MultiplierResult(lam, method, signature, float(margin), x_star)


# -- scalar case ---------------------------------------------------------------


def scalar_multiplier(a: float, b: float, tau: float) -> float:
    """Multiplier of ``min (a x - b)^2  s.t. |x| <= tau``: ``2 a^2 (|b/a| - tau)^+``.

    >>> scalar_multiplier(1.0, 2.0, 1.0)
    2.0
    """
    a, b, tau = float(a), float(b), float(tau)
    if a == 0.0:
        raise InvalidInputError("coefficient must be nonzero", "a")
    if not tau > 0.0:
        raise InvalidInputError("radius must be > 0", "tau")
    return 2.0 * a * a * max(abs(b / a) - tau, 0.0)


def _scalar_reduced(p: Problem):
    # one column, possibly m > 1: ||a x - b||^2 = ||a||^2 x^2 - 2<a,b> x + const
    norm_sq = float(column_norms_sq(p.a)[0])
    corr = float(column_correlations(p.a, p.b)[0])
    if norm_sq == 0.0:
        raise InapplicableError("scalar case needs a nonzero column", margin=0.0)
    norm = np.sqrt(norm_sq)
    lam = scalar_multiplier(norm, corr / norm, p.tau[0])
    x = float(np.clip(corr / norm_sq, -p.tau[0], p.tau[0]))
    return np.array([lam]), np.array([x]), norm


def scalar_problem_multipliers(p: Problem) -> MultiplierResult:
    """Scalar closed form for a problem with a single (non-pinned) unknown."""
    red = reduce_zero_tau(p)
    if red.reduced is None or red.reduced.n != 1:
        raise InapplicableError(
            f"scalar method needs exactly one coordinate with tau != 0, got {len(red.kept)}",
            n=len(red.kept),
        )
    lam, x, margin = _scalar_reduced(red.reduced)
    return _finish(red, lam, x, MultiplierMethod.SCALAR, None, margin)


# -- diagonal Gram -------------------------------------------------------------


def check_diagonal_gram(a: np.ndarray):
    """Worst relative off-diagonal Gram entry.

    Returns ``(ratio, (i, j))`` with ``ratio = max |<a_i, a_j>| / (||a_i|| ||a_j||)``
    over pairs of nonzero columns ``i < j`` (``(0.0, None)`` if there are
    none). The Gram matrix counts as diagonal when ``ratio <= diag_tol``.
    """
    norms = np.sqrt(column_norms_sq(a))
    nz = np.flatnonzero(norms > 0)
    if len(nz) < 2:
        return 0.0, None
    gram = gram_matrix(a[:, nz])
    ratio = np.abs(gram) / np.outer(norms[nz], norms[nz])
    np.fill_diagonal(ratio, -np.inf)
    flat = int(np.argmax(ratio))
    i, j = divmod(flat, len(nz))
    if i > j:
        i, j = j, i
    return float(ratio[i, j]), (int(nz[i]), int(nz[j]))


def diagonal_vertex(norms_sq: np.ndarray, corr: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """``c_j = |<b, a_j>| / ||a_j||^2 - tau_j`` for nonzero columns."""
    return np.abs(corr) / norms_sq - tau


def _diagonal_reduced(p: Problem, diag_tol: float):
    ratio, pair = check_diagonal_gram(p.a)
    if ratio > diag_tol:
        raise InapplicableError(
            f"A^T A is not diagonal: columns {pair[0]} and {pair[1]} have "
            f"relative inner product {ratio:.3g} > {diag_tol:.3g}",
            worst_pair=pair,
            worst_ratio=ratio,
        )
    norms = column_norms_sq(p.a)
    corr = column_correlations(p.a, p.b)
    lam = np.zeros(p.n)
    x = np.zeros(p.n)
    nz = norms > 0
    c = diagonal_vertex(norms[nz], corr[nz], p.tau[nz])
    # same expression as -grad g(0) in the geometry module: 2 n_j c_j
    lam[nz] = 2.0 * norms[nz] * np.maximum(c, 0.0)
    x[nz] = np.clip(corr[nz] / norms[nz], -p.tau[nz], p.tau[nz])
    return lam, x, diag_tol - ratio


def diagonal_multipliers(p: Problem, diag_tol: float = DEFAULT_DIAG_TOL) -> MultiplierResult:
    """Multipliers for a design with pairwise orthogonal columns.

    ``lam_j = 2 ||a_j||^2 (|<b, a_j>| / ||a_j||^2 - tau_j)^+`` for nonzero
    columns, ``lam_j = 0`` for zero columns.

    Raises
    ------
    InapplicableError
        If some pair of nonzero columns has
        ``|<a_i, a_j>| > diag_tol ||a_i|| ||a_j||``; ``details`` carries the
        worst pair and ratio.
    """
    red = reduce_zero_tau(p)
    if red.reduced is None:
        return _finish(red, None, None, MultiplierMethod.DIAGONAL_GRAM, None, diag_tol)
    lam, x, margin = _diagonal_reduced(red.reduced, diag_tol)
    return _finish(red, lam, x, MultiplierMethod.DIAGONAL_GRAM, None, margin)


# -- gradient sign -------------------------------------------------------------


def _signed_margins(p: Problem, signs: np.ndarray) -> np.ndarray:
    # sup over the box of s_k (A^T A u)_k is sum_j tau_j |G_kj|, attained at a corner
    gram = gram_matrix(p.a)
    corr = column_correlations(p.a, p.b)
    return signs * corr - np.abs(gram) @ p.tau


def _gradient_sign_lambda(p: Problem, signs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = signs * p.tau
    lam = 2.0 * signs * (p.a.T @ (p.b - p.a @ x))
    # the condition makes every entry >= 0; only rounding can push it below
    return np.maximum(lam, 0.0), x


def gradient_sign_multipliers(p: Problem) -> MultiplierResult:
    """Multipliers ``2 A^T (b - A tau)`` when the gradient is nonpositive on the box.

    The hypothesis ``sum_j u_j <a_j, a_k> <= <b, a_k>`` for all ``|u| <= tau``
    is checked exactly through its supremum over the box,
    ``sum_j tau_j |<a_j, a_k>| <= <b, a_k>``. Under it the constrained
    minimizer is the corner ``x = tau``.

    Raises
    ------
    InapplicableError
        With ``details`` ``worst_k`` and ``margin`` when the condition fails.
    """
    red = reduce_zero_tau(p)
    if red.reduced is None:
        return _finish(red, None, None, MultiplierMethod.GRADIENT_SIGN, None, 0.0)
    q = red.reduced
    margins = _signed_margins(q, np.ones(q.n))
    k = int(np.argmin(margins))
    if margins[k] < 0:
        raise InapplicableError(
            f"gradient sign condition fails at coordinate {red.kept[k]} (margin {margins[k]:.6g})",
            worst_k=red.kept[k],
            margin=float(margins[k]),
        )
    lam, x = _gradient_sign_lambda(q, np.ones(q.n))
    return _finish(red, lam, x, MultiplierMethod.GRADIENT_SIGN, None, margins[k])


def _signature_start(q: Problem) -> np.ndarray:
    corr = column_correlations(q.a, q.b)
    return np.where(corr < 0, -1.0, 1.0)


def gradient_sign_with_signature(p: Problem) -> MultiplierResult:
    """Gradient sign multipliers in the first admissible orthant.

    A signature ``S`` is admissible when ``S grad f(u) <= 0`` on the whole
    box; the multipliers are then ``2 S A^T (b - A S tau)`` and the
    constrained minimizer is ``S tau``.

    Signatures are searched in lexicographic order of their flip pattern
    relative to ``sign(A^T b)`` (first coordinate most significant). The
    admissibility test separates over coordinates (coordinate ``k`` only
    constrains ``s_k``), so the first admissible signature in that order is
    found coordinate by coordinate instead of enumerating all ``2^n``.

    Raises
    ------
    SizeLimitError
        If more than ``MAX_SIGNATURE_N`` coordinates remain after reduction.
    InapplicableError
        If no signature is admissible.
    """
    red = reduce_zero_tau(p)
    if red.reduced is None:
        return _finish(red, None, None, MultiplierMethod.GRADIENT_SIGN_WITH_SIGNATURE, Signature(()), 0.0)
    q = red.reduced
    if q.n > MAX_SIGNATURE_N:
        raise SizeLimitError(f"signature search is limited to n <= {MAX_SIGNATURE_N}, got {q.n}", n=q.n)
    start = _signature_start(q)
    keep = _signed_margins(q, start)
    flip = _signed_margins(q, -start)
    bad = np.flatnonzero((keep < 0) & (flip < 0))
    if len(bad):
        k = int(bad[0])
        raise InapplicableError(
            f"no admissible signature: coordinate {red.kept[k]} fails for both signs "
            f"(best margin {max(keep[k], flip[k]):.6g})",
            worst_k=red.kept[k],
            margin=float(max(keep[k], flip[k])),
        )
    signs = np.where(keep >= 0, start, -start)
    margins = np.where(keep >= 0, keep, flip)
    lam, x = _gradient_sign_lambda(q, signs)
    return _finish(
        red, lam, x, MultiplierMethod.GRADIENT_SIGN_WITH_SIGNATURE, Signature(signs), float(np.min(margins))
    )


# -- dispatch ------------------------------------------------------------------


def auto_multipliers(p: Problem, diag_tol: float = DEFAULT_DIAG_TOL) -> MultiplierResult:
    """First applicable closed form, tried from most to least specific.

    Order: scalar (one free coordinate), diagonal Gram, gradient sign,
    gradient sign with signature. Zero radii are reduced away first.

    Raises
    ------
    InapplicableError
        When no closed form applies; solve the problem numerically instead.
    """
    red = reduce_zero_tau(p)
    if red.reduced is not None and red.reduced.n == 1 and column_norms_sq(red.reduced.a)[0] > 0:
        return scalar_problem_multipliers(p)
    failures = []
    for method in (
        lambda: diagonal_multipliers(p, diag_tol),
        lambda: gradient_sign_multipliers(p),
        lambda: gradient_sign_with_signature(p),
    ):
        try:
            return method()
        except InapplicableError as exc:
            failures.append(str(exc))
    raise InapplicableError(
        "no closed form available for this problem; use the numerical solvers directly ("
        + "; ".join(failures)
        + ")",
        failures=failures,
    )
