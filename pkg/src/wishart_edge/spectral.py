"""Spectra of A = X^* X from the singular values of X.

X is reduced to bidiagonal form by Householder reflections and the bidiagonal
singular values are found by implicit-shift QR; A itself is never formed.
The hot loops live in the compiled ``_kernels`` extension, with a pure-Python
twin in ``_fallback`` selected when the extension is missing or when
``WISHART_EDGE_PURE=1``.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import _fallback

if os.environ.get("WISHART_EDGE_PURE", "") not in ("", "0"):
    _backend = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _backend
        BACKEND = "compiled"
    except ImportError:  # extension not built
        _backend = _fallback
        BACKEND = "python"

ConvergenceError = (_fallback.ConvergenceError,) + (
    (_backend.ConvergenceError,) if _backend is not _fallback else ())


def singular_values(a, backend=None):
    """Singular values of an arbitrary real/complex matrix, descending."""
    mod = _backend if backend is None else {"compiled": _kernels_or_fail(),
                                            "python": _fallback}[backend]
    a = np.asarray(a)
    if a.shape[0] < a.shape[1]:
        a = a.conj().T
    sv = mod.singular_values(a)
    order = np.argsort(-sv, kind="stable")
    return sv[order]


def _kernels_or_fail():
    from . import _kernels
    return _kernels


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of X^* X in descending order, with provenance."""

    eigenvalues: np.ndarray = field(repr=False)
    n: int
    p: int
    seed: int | None = None

    def __len__(self):
        return len(self.eigenvalues)


def gram_eigenvalues(x, backend=None) -> Spectrum:
    """All p eigenvalues of X^* X for an n x p sample (MatrixSample or array).

    For p > n the p - n eigenvalues that vanish identically are returned as
    exact zeros.
    """
    seed = None
    if hasattr(x, "entries"):
        seed = x.seed
        x = x.entries
    x = np.asarray(x)
    if x.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    if not np.all(np.isfinite(x)):
        raise ValueError("matrix has non-finite entries")
    n, p = x.shape
    sv = singular_values(x, backend=backend)
    eig = sv * sv
    if p > n:
        eig = np.concatenate([eig, np.zeros(p - n)])
    return Spectrum(eigenvalues=eig, n=n, p=p, seed=seed)


def top_k(s: Spectrum, k: int) -> np.ndarray:
    if not 1 <= k <= s.p:
        raise ValueError(f"k={k} out of range 1..{s.p}")
    return s.eigenvalues[:k].copy()


def trace_power(s: Spectrum, m: int) -> float:
    """Trace A^m = sum of lambda_i^m, summed with exact rounding (math.fsum)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    with np.errstate(over="ignore"):
        powers = np.power(s.eigenvalues, m)
    if not np.all(np.isfinite(powers)):
        raise OverflowError(f"lambda^m overflows at m={m}")
    out = math.fsum(powers)
    if not math.isfinite(out):
        raise OverflowError(f"trace power overflows at m={m}")
    return out


class EmpiricalSpectralDistribution:
    """Right-continuous step CDF of lambda_i / normalizer."""

    def __init__(self, points):
        self.points = np.sort(np.asarray(points, dtype=float))

    def __call__(self, x):
        return np.searchsorted(self.points, x, side="right") / len(self.points)

    def left_limit(self, x):
        return np.searchsorted(self.points, x, side="left") / len(self.points)

    def __len__(self):
        return len(self.points)


def empirical_spectral_distribution(s: Spectrum, normalizer: float) -> EmpiricalSpectralDistribution:
    if normalizer <= 0:
        raise ValueError("normalizer must be positive")
    return EmpiricalSpectralDistribution(s.eigenvalues / normalizer)
