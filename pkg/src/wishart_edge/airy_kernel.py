"""Airy and Laguerre kernels, Fredholm determinants and the real edge kernel.

Gap and counting probabilities of the complex (beta = 2) edge process are
Fredholm determinants of the Airy kernel on (s, inf). They are discretised by
Nystrom's method: Gauss-Legendre nodes on (s, s + L) and the symmetric matrix
M_ij = sqrt(w_i) S(x_i, x_j) sqrt(w_j), so that

    P(#(s, inf) = 0) = det(I - M)
    E z^{#(s, inf)}  = det(I + (z - 1) M) = prod_i (1 - lambda_i + z lambda_i)

with lambda_i the eigenvalues of M.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .airy import X_MAX, ai_lower_integral, ai_upper_tail, airy_arrays
from .scaling import scaling_constants

DIAGONAL_SWITCH = 1e-6
DEFAULT_LENGTH = 16.0
DEFAULT_NODES = 60
NODE_TOL = 1e-8


class FredholmConvergenceError(ArithmeticError):
    """Doubling the number of Nystrom nodes moved the determinant too much."""


def _airy_safe(x):
    """(Ai, Ai') with arguments above X_MAX mapped to exact zeros (Ai(40) ~ 1e-74)."""
    x = np.asarray(x, dtype=float)
    big = x > X_MAX
    a, ap = airy_arrays(np.where(big, X_MAX, x))
    return np.where(big, 0.0, a), np.where(big, 0.0, ap)


def _kernel_from_values(x1, a1, ap1, x2, a2, ap2):
    d = x1 - x2
    near = np.abs(d) < DIAGONAL_SWITCH
    with np.errstate(divide="ignore", invalid="ignore"):
        cd = (a1 * ap2 - ap1 * a2) / d
    if np.any(near):
        cd = np.array(cd, dtype=float)
        mid = (0.5 * (x1 + x2) + np.zeros_like(cd))[near]
        am, apm = _airy_safe(mid)
        cd[near] = apm * apm - mid * am * am
    return cd


def airy_kernel(s1, s2):
    """S(s1, s2) = (Ai(s1) Ai'(s2) - Ai'(s1) Ai(s2)) / (s1 - s2), broadcasting."""
    s1, s2 = np.broadcast_arrays(np.asarray(s1, dtype=float), np.asarray(s2, dtype=float))
    a1, ap1 = _airy_safe(s1)
    a2, ap2 = _airy_safe(s2)
    out = _kernel_from_values(s1, a1, ap1, s2, a2, ap2)
    return out if out.ndim else float(out)


def airy_kernel_d2(s1, s2):
    """Partial derivative of S(s1, s2) in s2.

    Off the diagonal this differentiates the Christoffel-Darboux quotient
    (Ai'' = x Ai); near it the quotient cancels badly, and the integral form
    int_0^inf Ai(s1 + t) Ai'(s2 + t) dt is used instead.
    """
    b1, b2 = np.broadcast_arrays(np.asarray(s1, dtype=float), np.asarray(s2, dtype=float))
    s1, s2 = b1.ravel(), b2.ravel()
    a1, ap1 = _airy_safe(s1)
    a2, ap2 = _airy_safe(s2)
    d = s1 - s2
    near = np.abs(d) < 1e-2
    with np.errstate(divide="ignore", invalid="ignore"):
        num = a1 * s2 * a2 - ap1 * ap2
        out = num / d + (a1 * ap2 - ap1 * a2) / (d * d)
    for i in np.nonzero(near)[0]:
        x1, x2 = float(s1[i]), float(s2[i])
        out[i] = _half_line_quad(lambda t: _airy_safe(x1 + t)[0] * _airy_safe(x2 + t)[1],
                                 min(x1, x2))
    out = out.reshape(b1.shape)
    return out if out.ndim else float(out)


_GL16_X, _GL16_W = np.polynomial.legendre.leggauss(16)


def _half_line_quad(f, lowest):
    """int_0^inf f(t) dt for integrands decaying like Ai(lowest + t)^2 or faster.

    Unit panels with 16 Gauss-Legendre nodes up to lowest + t = 30, where the
    integrand is below 1e-30.
    """
    end = max(30.0 - lowest, 1.0)
    npan = int(math.ceil(end))
    edges = np.linspace(0.0, end, npan + 1)
    half = 0.5 * np.diff(edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mids[:, None] + half[:, None] * _GL16_X[None, :]).ravel()
    weights = (half[:, None] * _GL16_W[None, :]).ravel()
    return float(np.dot(weights, f(nodes)))


# ---------------------------------------------------------------------------
# Nystrom discretisation

@dataclass(frozen=True)
class KernelDiscretization:
    s_min: float
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    matrix: np.ndarray = field(repr=False)

    @property
    def size(self):
        return len(self.nodes)

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)


def discretize(s, m_nodes=DEFAULT_NODES, length=DEFAULT_LENGTH) -> KernelDiscretization:
    """Nystrom matrix of the Airy kernel on (s, s + length)."""
    if m_nodes < 20:
        raise ValueError("m_nodes must be >= 20")
    if s < -8.0:
        raise ValueError("s must be >= -8")
    gx, gw = np.polynomial.legendre.leggauss(int(m_nodes))
    half = 0.5 * length
    x = s + half * (gx + 1.0)
    w = half * gw
    a, ap = _airy_safe(x)
    k = _kernel_from_values(x[:, None], a[:, None], ap[:, None], x[None, :], a[None, :], ap[None, :])
    sw = np.sqrt(w)
    m = sw[:, None] * k * sw[None, :]
    m = 0.5 * (m + m.T)
    for arr in (x, w, m):
        arr.setflags(write=False)
    return KernelDiscretization(s_min=float(s), nodes=x, weights=w, matrix=m)


def _gap_from(disc):
    lam = disc.eigenvalues()
    return float(np.prod(1.0 - lam))


def fredholm_gap(s, m_nodes=DEFAULT_NODES, length=DEFAULT_LENGTH, check=True):
    """det(I - S) on L^2(s, inf): the beta = 2 law F2(s).

    With ``check`` the value is recomputed with twice the nodes and a change
    above 1e-8 raises FredholmConvergenceError.
    """
    value = _gap_from(discretize(s, m_nodes, length))
    if check:
        fine = _gap_from(discretize(s, 2 * m_nodes, length))
        if abs(fine - value) > NODE_TOL:
            raise FredholmConvergenceError(
                f"fredholm_gap(s={s:g}): node doubling {m_nodes}->{2 * m_nodes} "
                f"changed the determinant by {abs(fine - value):.3g}")
    return value


def _poly_from_eigenvalues(lam, k_max):
    """Coefficients of prod_i (1 - lam_i + z lam_i) up to z^k_max."""
    coef = np.zeros(k_max + 1)
    coef[0] = 1.0
    for lv in lam:
        shifted = np.concatenate([[0.0], coef[:-1]])
        coef = coef * (1.0 - lv) + shifted * lv
    return coef


def _poly_by_interpolation(m, k_max):
    """Coefficients of det(I + (z - 1) M) from values at z = j / (k_max + 1)."""
    zs = np.arange(k_max + 2) / (k_max + 1)
    eye = np.eye(len(m))
    vals = np.array([np.linalg.det(eye + (z - 1.0) * m) for z in zs])
    coef = np.polynomial.polynomial.polyfit(zs, vals, k_max + 1)
    return coef[:k_max + 1]


def count_distribution(s, k_max, m_nodes=DEFAULT_NODES, length=DEFAULT_LENGTH,
                       method="product", check=True):
    """P(#(s, inf) = j) for j = 0..k_max under the Airy point process.

    ``method="product"`` expands prod_i (1 - lambda_i + z lambda_i) over the
    Nystrom eigenvalues (a Poisson-binomial convolution, exact in z).
    ``method="interpolation"`` fits the polynomial through k_max + 2 real
    values of det(I + (z - 1) M); kept as a cross-check.
    """
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    disc = discretize(s, m_nodes, length)
    if method == "product":
        probs = _poly_from_eigenvalues(disc.eigenvalues(), k_max)
    elif method == "interpolation":
        probs = _poly_by_interpolation(disc.matrix, k_max)
    else:
        raise ValueError(f"unknown method {method!r}")
    if check:
        fine = _gap_from(discretize(s, 2 * m_nodes, length))
        if abs(fine - probs[0]) > NODE_TOL:
            raise FredholmConvergenceError(
                f"count_distribution(s={s:g}): node doubling changed P(#=0) by "
                f"{abs(fine - probs[0]):.3g}")
    if np.any(probs < -1e-10):
        j = int(np.argmin(probs))
        raise FredholmConvergenceError(
            f"count_distribution(s={s:g}): P(#={j}) = {probs[j]:.3g} is negative")
    probs = np.maximum(probs, 0.0)
    if probs.sum() > 1.0 + 1e-8:
        raise FredholmConvergenceError(f"count_distribution(s={s:g}): total mass {probs.sum():.12g} > 1")
    return probs


def topk_cdf_complex(k, s, m_nodes=DEFAULT_NODES, length=DEFAULT_LENGTH):
    """P(k-th largest rescaled eigenvalue <= s) = sum_{j<k} P(#(s, inf) = j)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return float(np.sum(count_distribution(s, k - 1, m_nodes, length)))


# ---------------------------------------------------------------------------
# Laguerre kernel

def laguerre_functions(p, alpha, x):
    """Orthonormal Laguerre functions phi_0..phi_{p-1} at x (array), shape (p, len(x)).

    phi_j(x) = sqrt(j! / (j + alpha)!) x^{alpha/2} e^{-x/2} L_j^alpha(x),
    generated by the normalised three-term recurrence. The common factor
    e^{-x/2} underflows at edge scale, so values are carried with a separate
    log-scale that is renormalised whenever the mantissa grows large.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0) or not np.all(np.isfinite(x)):
        raise ValueError("x must be positive and finite")
    log0 = 0.5 * alpha * np.log(x) - 0.5 * x - 0.5 * math.lgamma(alpha + 1.0)
    if not np.all(np.isfinite(log0)):
        raise OverflowError(f"Laguerre normalisation overflows for alpha={alpha}")
    mant = np.empty((p, x.size))
    logs = np.empty((p, x.size))
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    scale = log0.copy()
    mant[0], logs[0] = cur, scale
    for j in range(p - 1):
        a = (2 * j + 1 + alpha - x) / math.sqrt((j + 1) * (j + 1 + alpha))
        b = math.sqrt(j * (j + alpha) / ((j + 1) * (j + 1 + alpha)))
        nxt = a * cur - b * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > 1e150
        if np.any(big):
            factor = np.where(big, 1e-150, 1.0)
            cur = cur * factor
            prev = prev * factor
            scale = scale + np.where(big, 150.0 * math.log(10.0), 0.0)
        mant[j + 1], logs[j + 1] = cur, scale
    with np.errstate(under="ignore"):
        return mant * np.exp(logs)


def laguerre_kernel(p, alpha, x, y):
    """S_p(x, y) = sum_{j<p} phi_j(x) phi_j(y) for the weight x^alpha e^{-x}."""
    xs, ys = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    fx = laguerre_functions(p, alpha, xs.ravel())
    fy = laguerre_functions(p, alpha, ys.ravel())
    out = np.einsum("jk,jk->k", fx, fy).reshape(xs.shape)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class KernelConvergence:
    finite_p_value: float
    airy_value: float
    difference: float


def rescaled_kernel_convergence(p, alpha, s1, s2) -> KernelConvergence:
    """sigma S_p(mu + sigma s1, mu + sigma s2) against S(s1, s2), with n = p + alpha."""
    c = scaling_constants(p + alpha, p)
    finite = c.sigma * laguerre_kernel(p, alpha, c.mu + c.sigma * s1, c.mu + c.sigma * s2)
    limit = airy_kernel(s1, s2)
    return KernelConvergence(float(finite), float(limit), float(finite - limit))


def kernel_sup_difference(p, alpha=0, grid=(-2.0, 0.0, 2.0)):
    """sup over grid x grid of |rescaled Laguerre kernel - Airy kernel|."""
    c = scaling_constants(p + alpha, p)
    g = np.asarray(grid, dtype=float)
    s1, s2 = np.meshgrid(g, g, indexing="ij")
    finite = c.sigma * laguerre_kernel(p, alpha, c.mu + c.sigma * s1, c.mu + c.sigma * s2)
    return float(np.max(np.abs(finite - airy_kernel(s1, s2))))


# ---------------------------------------------------------------------------
# limiting 2x2 kernel of the real (beta = 1) edge

def _eps(x):
    return 0.5 * np.sign(x)


def real_k11(s1, s2):
    """S(s1, s2) + Ai(s1)/2 * int_{-inf}^{s2} Ai."""
    a1 = _airy_safe(np.asarray(s1, dtype=float))[0]
    return airy_kernel(s1, s2) + 0.5 * a1 * ai_lower_integral(s2)


def real_k22(s1, s2):
    return real_k11(s2, s1)


def real_k12(s1, s2):
    """-Ai(s1) Ai(s2)/2 - d/ds2 S(s1, s2); zero on the diagonal."""
    a1 = _airy_safe(np.asarray(s1, dtype=float))[0]
    a2 = _airy_safe(np.asarray(s2, dtype=float))[0]
    return -0.5 * a1 * a2 - airy_kernel_d2(s1, s2)


def _tail_ai(x):
    return ai_upper_tail(np.minimum(x, X_MAX))


def real_k21(s1, s2):
    """-int_0^inf T(s1 + u) Ai(s2 + u) du - eps(s1 - s2) + (T(s2) - T(s1))/2 + T(s1) T(s2)/2,

    with T(x) = int_x^inf Ai. The last product uses int_{s2}^inf Ai, which
    makes the entry antisymmetric in (s1, s2), as a skew kernel entry must be.
    """
    s1 = float(s1)
    s2 = float(s2)
    inner = _half_line_quad(lambda u: _tail_ai(s1 + u) * _airy_safe(s2 + u)[0], min(s1, s2))
    t1, t2 = float(_tail_ai(s1)), float(_tail_ai(s2))
    return -inner - float(_eps(s1 - s2)) + 0.5 * (t2 - t1) + 0.5 * t1 * t2


@dataclass(frozen=True)
class RealEdgeKernel:
    """The four limiting entries as callables of (s1, s2)."""

    k11: Callable = real_k11
    k12: Callable = real_k12
    k21: Callable = real_k21
    k22: Callable = real_k22

    def __call__(self, s1, s2):
        return real_edge_kernel(s1, s2)


def real_edge_kernel(s1, s2):
    """2x2 matrix [[K11, K12], [K21, K22]] at (s1, s2)."""
    for v in (s1, s2):
        if v < -8.0:
            raise ValueError("real_edge_kernel needs s1, s2 >= -8")
    return np.array([[float(real_k11(s1, s2)), float(real_k12(s1, s2))],
                     [real_k21(s1, s2), float(real_k22(s1, s2))]])


def real_edge_density(s):
    """One-point density of the real edge process: sqrt(det K(s, s)).

    K12(s, s) vanishes identically, so det K(s, s) = K11(s, s)^2 and the
    double integral in K21 is skipped when K12 evaluates to exactly 0.
    """
    if s < -8.0:
        raise ValueError("real_edge_density needs s >= -8")
    k11 = float(real_k11(s, s))
    k12 = float(real_k12(s, s))
    det = k11 * float(real_k22(s, s))
    if k12 != 0.0:
        det -= k12 * real_k21(s, s)
    if det < -1e-6:
        raise ArithmeticError(f"real_edge_density(s={s:g}): negative determinant {det:.3g}")
    det = max(det, 0.0)
    return math.sqrt(det)
