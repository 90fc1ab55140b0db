"""Denoising with per-sample (or per-coefficient) magnitude bounds.

With ``A = I`` the box problem ``min ||x - b||^2, |x_j| <= tau_j`` has
multipliers ``2 (|b_j| - tau_j)^+`` and its solution is the clamp of ``b``
to the box. For an orthogonal synthesis matrix ``Phi`` the same holds in
coefficient space, since ``Phi^T Phi = I`` makes the Gram matrix diagonal.

Complex DFT coefficients are handled through the real embedding of
``C^n`` as ``R^{2n}`` (interleaved real and imaginary parts). Bounds then
apply to real and imaginary parts separately, not to the complex modulus.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import IO, Optional

import numpy as np
from scipy.ndimage import gaussian_filter1d

from .errors import InvalidInputError
from .model import as_vector, clamp

__all__ = [
    "Signal",
    "TransformKind",
    "Transform",
    "dct2_matrix",
    "dft_real_matrix",
    "denoising_multipliers",
    "denoise_identity",
    "denoise_transform",
    "estimate_tau_gaussian",
    "add_gaussian_noise",
    "read_signal_csv",
    "write_signal_csv",
]


@dataclass(frozen=True)
class Signal:
    samples: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "samples", as_vector(self.samples, field="samples"))

    def __len__(self) -> int:
        return self.samples.shape[0]


def _samples(b) -> np.ndarray:
    return b.samples if isinstance(b, Signal) else as_vector(b, field="samples")


def _label(b) -> Optional[str]:
    return b.label if isinstance(b, Signal) else None


def dct2_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II analysis matrix.

    Entry ``(k, j)`` is ``s_k cos(pi (2j + 1) k / (2n))`` with
    ``s_0 = sqrt(1/n)`` and ``s_k = sqrt(2/n)`` otherwise.
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidInputError(f"size must be a positive integer, got {n!r}", "n")
    n = int(n)
    k = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    mat = np.cos(np.pi * (2 * j + 1) * k / (2 * n))
    scale = np.full((n, 1), math.sqrt(2.0 / n))
    scale[0, 0] = math.sqrt(1.0 / n)
    return scale * mat


def dft_real_matrix(n_complex: int) -> np.ndarray:
    """Real ``2n x 2n`` embedding of the unitary inverse DFT.

    Acts on interleaved ``(re_0, im_0, re_1, im_1, ...)`` vectors. Its
    transpose maps a signal to its unitary DFT coefficients.
    """
    if isinstance(n_complex, bool) or int(n_complex) != n_complex or n_complex < 1:
        raise InvalidInputError(f"size must be a positive integer, got {n_complex!r}", "n")
    n = int(n_complex)
    idx = np.arange(n)
    inv = np.exp(2j * np.pi * np.outer(idx, idx) / n) / math.sqrt(n)
    out = np.empty((2 * n, 2 * n))
    out[0::2, 0::2] = inv.real
    out[0::2, 1::2] = -inv.imag
    out[1::2, 0::2] = inv.imag
    out[1::2, 1::2] = inv.real
    return out


class TransformKind(str, enum.Enum):
    IDENTITY = "identity"
    DCT = "dct"
    DFT = "dft"


@dataclass(frozen=True)
class Transform:
    """Orthogonal synthesis matrix ``Phi`` of a given real length.

    For :attr:`TransformKind.DFT` the length counts real entries and must be
    even (pairs of real and imaginary parts).
    """

    kind: TransformKind
    size: int

    def __post_init__(self):
        object.__setattr__(self, "kind", TransformKind(self.kind))
        if isinstance(self.size, bool) or int(self.size) != self.size or self.size < 1:
            raise InvalidInputError(f"size must be a positive integer, got {self.size!r}", "size")
        if self.kind is TransformKind.DFT and self.size % 2:
            raise InvalidInputError("DFT signals interleave re/im parts; length must be even", "size")

    @cached_property
    def matrix(self) -> np.ndarray:
        if self.kind is TransformKind.IDENTITY:
            return np.eye(self.size)
        if self.kind is TransformKind.DCT:
            return dct2_matrix(self.size).T
        return dft_real_matrix(self.size // 2)

    def analyze(self, b) -> np.ndarray:
        b = _samples(b)
        if b.shape[0] != self.size:
            raise InvalidInputError(f"signal length {b.shape[0]} != transform size {self.size}", "samples")
        return self.matrix.T @ b

    def synthesize(self, z) -> np.ndarray:
        z = as_vector(z, self.size, "coefficients")
        return self.matrix @ z


def denoising_multipliers(coeffs, tau) -> np.ndarray:
    """``2 (|z_j| - tau_j)^+`` -- multipliers of the identity-design problem."""
    coeffs = as_vector(coeffs, field="coefficients")
    tau = _radii(tau, coeffs.shape[0])
    return 2.0 * np.maximum(np.abs(coeffs) - tau, 0.0)


def _radii(tau, n: int) -> np.ndarray:
    tau = as_vector(tau, n, "tau")
    if np.any(tau < 0):
        raise InvalidInputError("radii must be >= 0", "tau")
    return tau


def denoise_identity(b, tau) -> Signal:
    """Minimizer of ``||x - b||^2 + sum_j 2 (|b_j| - tau_j)^+ |x_j|``.

    Soft-thresholding at ``(|b_j| - tau_j)^+`` is the clamp of ``b_j`` to
    ``[-tau_j, tau_j]``; the clamp is what gets computed, so the result is
    exact.
    """
    s = _samples(b)
    return Signal(clamp(s, _radii(tau, s.shape[0])), _label(b))


def denoise_transform(b, tau, t: Transform) -> Signal:
    """Clamp the coefficients ``Phi^T b`` to ``[-tau, tau]`` and resynthesize."""
    z = t.analyze(b)
    z = clamp(z, _radii(tau, z.shape[0]))
    return Signal(t.synthesize(z), _label(b))


def estimate_tau_gaussian(b, sigma: float, t: Transform, headroom: float = 1.0) -> np.ndarray:
    """Coefficient bounds from a Gaussian-smoothed copy of ``b``.

    The kernel is truncated at 4 sigma and renormalized; boundaries use
    half-sample symmetric reflection. For DFT signals the real and imaginary
    sequences are smoothed separately.
    """
    if not sigma > 0:
        raise InvalidInputError(f"sigma must be > 0, got {sigma!r}", "sigma")
    if not headroom > 0:
        raise InvalidInputError(f"headroom must be > 0, got {headroom!r}", "headroom")
    s = _samples(b)
    if t.kind is TransformKind.DFT:
        smooth = gaussian_filter1d(s.reshape(-1, 2), sigma, axis=0, mode="reflect", truncate=4.0).ravel()
    else:
        smooth = gaussian_filter1d(s, sigma, mode="reflect", truncate=4.0)
    return headroom * np.abs(t.analyze(smooth))


def _philox_uniforms(seed: int, count: int) -> np.ndarray:
    gen = np.random.Generator(np.random.Philox(seed))
    return gen.random(count)


def add_gaussian_noise(b, noise_sigma: float, seed: int) -> Signal:
    """Add ``N(0, noise_sigma^2)`` noise, bit-reproducible for a given seed.

    Uniforms come from the Philox4x64 counter-based generator and are turned
    into normals with the Box-Muller transform.
    """
    if not noise_sigma >= 0:
        raise InvalidInputError(f"noise_sigma must be >= 0, got {noise_sigma!r}", "noise_sigma")
    s = _samples(b)
    n = s.shape[0]
    pairs = (n + 1) // 2
    u = _philox_uniforms(int(seed), 2 * pairs).reshape(pairs, 2)
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))  # 1 - u lies in (0, 1]
    angle = 2.0 * np.pi * u[:, 1]
    normals = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)]).ravel()[:n]
    return Signal(s + noise_sigma * normals, _label(b))


def read_signal_csv(fh: IO[str]) -> Signal:
    """One float per line; an optional leading ``# label`` line."""
    label = None
    values = []
    for lineno, line in enumerate(fh, 1):
        text = line.strip()
        if not text:
            continue
        if text.startswith("#"):
            if values or label is not None:
                raise InvalidInputError(f"line {lineno}: label must be the first line", "signal")
            label = text[1:].strip()
            continue
        try:
            values.append(float(text))
        except ValueError:
            raise InvalidInputError(f"line {lineno}: not a number: {text!r}", "signal") from None
    if not values:
        raise InvalidInputError("signal is empty", "signal")
    return Signal(np.array(values), label)


def write_signal_csv(sig: Signal, fh: IO[str]) -> None:
    if sig.label:
        fh.write(f"# {sig.label}\n")
    for v in sig.samples:
        fh.write(f"{v:.17g}\n")
