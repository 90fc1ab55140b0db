"""Seeded generators of problems that satisfy a chosen closed form's hypotheses."""

from __future__ import annotations

import numpy as np

from .denoise import dct2_matrix
from .errors import InvalidInputError
from .model import Problem, gram_matrix

__all__ = ["KINDS", "generate_problem"]

KINDS = ("scalar", "diagonal", "gradient-sign", "random")


def _diagonal(rng: np.random.Generator, m: int, n: int) -> Problem:
    # distinct DCT basis vectors are orthonormal; columns beyond m are zero
    basis = dct2_matrix(m).T
    picks = rng.permutation(m)[: min(m, n)]
    a = np.zeros((m, n))
    a[:, : len(picks)] = basis[:, picks] * rng.uniform(0.5, 3.0, size=len(picks))
    b = rng.normal(scale=3.0, size=m)
    tau = rng.uniform(0.05, 2.0, size=n)
    return Problem(a, b, tau)


def _gradient_sign(rng: np.random.Generator, m: int, n: int) -> Problem:
    if m < n:
        raise InvalidInputError(f"gradient-sign instances need m >= n, got m={m}, n={n}", "m")
    a = rng.normal(size=(m, n))
    gram = gram_matrix(a)
    tau = rng.uniform(0.1, 2.0, size=n)
    # b = A (tau + s v) with G v = 1 gives margins (G tau - |G| tau)_k + s
    v = np.linalg.solve(gram, np.ones(n))
    s = float(np.max(np.abs(gram) @ tau - gram @ tau)) + rng.uniform(0.5, 2.0)
    b = a @ (tau + s * v)
    return Problem(a, b, tau)


def generate_problem(kind: str, n: int = 1, m: int | None = None, seed: int = 0) -> Problem:
    """Problem of the requested kind, reproducible from ``seed``.

    ``scalar`` ignores the sizes (1 x 1). ``diagonal`` has pairwise
    orthogonal columns. ``gradient-sign`` satisfies the corner-margin
    condition with a positive margin. ``random`` has Gaussian entries and no
    structure.
    """
    if kind not in KINDS:
        raise InvalidInputError(f"unknown kind {kind!r}; choose from {', '.join(KINDS)}", "kind")
    m = n if m is None else m
    for name, val in (("n", n), ("m", m)):
        if isinstance(val, bool) or int(val) != val or val < 1:
            raise InvalidInputError(f"must be a positive integer, got {val!r}", name)
    rng = np.random.default_rng(seed)
    if kind == "scalar":
        a = rng.uniform(0.5, 3.0) * rng.choice([-1.0, 1.0])
        return Problem([[a]], [rng.normal(scale=3.0)], [rng.uniform(0.1, 2.0)])
    if kind == "diagonal":
        return _diagonal(rng, int(m), int(n))
    if kind == "gradient-sign":
        return _gradient_sign(rng, int(m), int(n))
    return Problem(rng.normal(size=(m, n)), rng.normal(scale=2.0, size=m), rng.uniform(0.1, 2.0, size=n))
