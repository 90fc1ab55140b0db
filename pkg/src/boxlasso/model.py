"""Core domain types: dense design matrices, box-constrained problems,
multiplier vectors, signatures and solver results.

Matrices and vectors are plain ``numpy.ndarray`` objects of dtype float64.
Everything stored on a :class:`Problem` is copied and marked read-only, so
instances can be shared freely.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "as_matrix",
    "as_vector",
    "as_multipliers",
    "column",
    "gram_entry",
    "gram_matrix",
    "column_norms_sq",
    "column_correlations",
    "clamp",
    "is_feasible",
    "Problem",
    "Signature",
    "SolveResult",
]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


def as_matrix(a: Any, field: str = "A") -> np.ndarray:
    """Validate ``a`` as a finite, non-empty 2-D float array (read-only copy)."""
    try:
        arr = np.asarray(a, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"not a real matrix ({exc})", field) from None
    if arr.ndim != 2:
        raise InvalidInputError(f"expected a 2-D matrix, got ndim={arr.ndim}", field)
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"matrix must have positive dimensions, got {arr.shape}", field)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("entries must be finite", field)
    return _frozen(arr)


def as_vector(v: Any, length: int | None = None, field: str = "x") -> np.ndarray:
    """Validate ``v`` as a finite 1-D float array, optionally of fixed length."""
    try:
        arr = np.asarray(v, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"not a real vector ({exc})", field) from None
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise InvalidInputError(f"expected a 1-D vector, got ndim={arr.ndim}", field)
    if length is not None and arr.shape[0] != length:
        raise InvalidInputError(f"expected length {length}, got {arr.shape[0]}", field)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("entries must be finite", field)
    return _frozen(arr)


def as_multipliers(lam: Any, length: int | None = None) -> np.ndarray:
    """Validate a multiplier vector: finite and componentwise nonnegative."""
    arr = as_vector(lam, length, field="lambda")
    if np.any(arr < 0):
        j = int(np.argmin(arr))
        raise InvalidInputError(f"multipliers must be >= 0 (entry {j} is {arr[j]!r})", "lambda")
    return arr


def _check_index(a: np.ndarray, j: int, axis_len: int) -> int:
    if not isinstance(j, (int, np.integer)) or not 0 <= j < axis_len:
        raise IndexError(f"column index {j!r} out of range for {a.shape[1]} columns")
    return int(j)


def column(a: np.ndarray, j: int) -> np.ndarray:
    """Return a copy of column ``j`` of ``a``."""
    j = _check_index(a, j, a.shape[1])
    return np.array(a[:, j], dtype=np.float64)


def gram_entry(a: np.ndarray, i: int, j: int) -> float:
    """Inner product of columns ``i`` and ``j``.

    Summed with :func:`math.fsum` over the row index, so the result is
    correctly rounded and ``gram_entry(a, i, j) == gram_entry(a, j, i)``
    holds bit for bit.
    """
    i = _check_index(a, i, a.shape[1])
    j = _check_index(a, j, a.shape[1])
    return math.fsum(a[:, i] * a[:, j])


def gram_matrix(a: np.ndarray) -> np.ndarray:
    """``A^T A`` built from :func:`gram_entry`; exactly symmetric."""
    n = a.shape[1]
    g = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            g[i, j] = g[j, i] = gram_entry(a, i, j)
    return g


def column_norms_sq(a: np.ndarray) -> np.ndarray:
    """Squared Euclidean norms of the columns (correctly rounded)."""
    return np.array([math.fsum(a[:, j] * a[:, j]) for j in range(a.shape[1])])


def column_correlations(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``<b, a_j>`` for every column ``j`` (correctly rounded)."""
    return np.array([math.fsum(a[:, j] * b) for j in range(a.shape[1])])


def clamp(x: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """Coordinatewise projection of ``x`` onto the box ``[-tau, tau]``."""
    return np.minimum(np.maximum(x, -tau), tau)


@dataclass(frozen=True)
class Problem:
    """Box-constrained least squares ``min ||Ax - b||^2  s.t. |x_j| <= tau_j``.

    Radii equal to zero are allowed; they pin the coordinate to zero.
    """

    a: np.ndarray
    b: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        a = as_matrix(self.a, "A")
        b = as_vector(self.b, a.shape[0], "b")
        tau = as_vector(self.tau, a.shape[1], "tau")
        if np.any(tau < 0):
            j = int(np.argmin(tau))
            raise InvalidInputError(f"radii must be >= 0 (entry {j} is {tau[j]!r})", "tau")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "tau", tau)

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def n(self) -> int:
        return self.a.shape[1]

    def objective(self, x: np.ndarray) -> float:
        """Fidelity ``||Ax - b||^2``."""
        r = self.a @ np.asarray(x, dtype=np.float64) - self.b
        return float(r @ r)

    def with_tau(self, tau: Any) -> "Problem":
        return Problem(self.a, self.b, tau)

    # -- JSON --------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "A": self.a.ravel().tolist(),
            "b": self.b.tolist(),
            "tau": self.tau.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Problem":
        """Strict parser for the on-disk problem format.

        Every failure raises :class:`InvalidInputError` naming the field.
        """
        if not isinstance(data, Mapping):
            raise InvalidInputError("problem must be a JSON object", "<root>")
        for key in ("m", "n", "A", "b", "tau"):
            if key not in data:
                raise InvalidInputError("missing required field", key)
        m, n = data["m"], data["n"]
        for key, val in (("m", m), ("n", n)):
            if isinstance(val, bool) or not isinstance(val, int) or val < 1:
                raise InvalidInputError(f"must be a positive integer, got {val!r}", key)
        for key in ("A", "b", "tau"):
            if not isinstance(data[key], list):
                raise InvalidInputError("must be a list of numbers", key)
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in data[key]):
                raise InvalidInputError("must contain only numbers", key)
        if len(data["A"]) != m * n:
            raise InvalidInputError(f"expected m*n = {m * n} entries, got {len(data['A'])}", "A")
        if len(data["b"]) != m:
            raise InvalidInputError(f"expected m = {m} entries, got {len(data['b'])}", "b")
        if len(data["tau"]) != n:
            raise InvalidInputError(f"expected n = {n} entries, got {len(data['tau'])}", "tau")
        a = np.asarray(data["A"], dtype=np.float64).reshape(m, n)
        return cls(a, data["b"], data["tau"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Problem":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"malformed JSON ({exc})", "<root>") from None
        return cls.from_dict(data)


def is_feasible(p: Problem, x: Any, tol: float = 0.0) -> bool:
    """True iff ``|x_j| <= tau_j + tol`` for every coordinate."""
    x = as_vector(x, p.n, "x")
    if tol < 0:
        raise InvalidInputError("tolerance must be >= 0", "tol")
    return bool(np.all(np.abs(x) <= p.tau + tol))


@dataclass(frozen=True)
class Signature:
    """Diagonal +-1 matrix, stored as its sign vector."""

    signs: tuple[int, ...]

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if any(s not in (-1, 1) for s in signs):
            raise InvalidInputError("signature entries must be -1 or +1", "signature")
        object.__setattr__(self, "signs", signs)

    @classmethod
    def identity(cls, n: int) -> "Signature":
        return cls((1,) * n)

    @property
    def n(self) -> int:
        return len(self.signs)

    def as_array(self) -> np.ndarray:
        return np.array(self.signs, dtype=np.float64)

    def apply(self, v: Any) -> np.ndarray:
        """Return ``S v``; multiplying by +-1 is exact, so ``S(S v) == v``."""
        v = np.asarray(v, dtype=np.float64)
        if v.shape[0] != self.n:
            raise InvalidInputError(f"expected length {self.n}, got {v.shape[0]}", "v")
        return self.as_array() * v

    def to_list(self) -> list[int]:
        return list(self.signs)


@dataclass(frozen=True)
class SolveResult:
    x: np.ndarray
    objective: float
    iterations: int
    converged: bool
    tolerance_used: float

    def to_dict(self) -> dict:
        return {
            "x": np.asarray(self.x).tolist(),
            "objective": float(self.objective),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
        }

