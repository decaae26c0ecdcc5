"""Edge centring/scaling constants and the Marchenko-Pastur bulk law."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq


@dataclass(frozen=True)
class ScalingConstants:
    mu: float
    sigma: float
    gamma: float
    a: float
    b: float
    n: int
    p: int


def scaling_constants(n: int, p: int, johnstone: bool = False) -> ScalingConstants:
    """Centre mu = (sqrt n + sqrt p)^2 and scale of the largest eigenvalue.

    With ``johnstone=True`` the row count n is replaced by n - 1 in mu and
    sigma (the real-case convention); gamma and the bulk edges always use n.
    """
    if n < 1 or p < 1:
        raise ValueError("n and p must be >= 1")
    ne = n - 1 if johnstone else n
    if ne < 1:
        raise ValueError("johnstone centring needs n >= 2")
    rn, rp = math.sqrt(ne), math.sqrt(p)
    mu = (rn + rp) ** 2
    sigma = (rn + rp) * (1.0 / rn + 1.0 / rp) ** (1.0 / 3.0)
    gamma = n / p
    a = (1.0 - gamma ** -0.5) ** 2
    b = (1.0 + gamma ** -0.5) ** 2
    return ScalingConstants(mu=mu, sigma=sigma, gamma=gamma, a=a, b=b, n=n, p=p)


def rescale(lam, c: ScalingConstants):
    return (np.asarray(lam, dtype=float) - c.mu) / c.sigma if np.ndim(lam) else (lam - c.mu) / c.sigma


def unrescale(s, c: ScalingConstants):
    return c.mu + c.sigma * np.asarray(s, dtype=float) if np.ndim(s) else c.mu + c.sigma * s


def mp_edges(gamma):
    return (1.0 - gamma ** -0.5) ** 2, (1.0 + gamma ** -0.5) ** 2


def mp_density(x, gamma):
    """Marchenko-Pastur density of A/n for n/p = gamma (absolutely continuous part).

    For gamma < 1 this part has mass gamma; the remaining 1 - gamma sits at 0.
    At gamma = 1 the density diverges like x^{-1/2} at the origin and
    ``mp_density(0, 1)`` is +inf.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    a, b = mp_edges(gamma)
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x >= a) & (x <= b)
    xi = x[inside]
    with np.errstate(divide="ignore", invalid="ignore"):
        if a == 0.0:
            vals = gamma * np.sqrt(np.maximum(b - xi, 0.0)) / (2 * math.pi * np.sqrt(xi))
        else:
            vals = gamma / (2 * math.pi * xi) * np.sqrt(np.maximum((b - xi) * (xi - a), 0.0))
    out[inside] = vals
    return out if out.ndim else float(out)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)


def _gl(f, lo, hi):
    half = 0.5 * (hi - lo)
    return half * float(np.dot(_GL_W, f(lo + half * (_GL_X + 1.0))))


def _adaptive_gl(f, lo, hi, tol=1e-14, depth=0):
    whole = _gl(f, lo, hi)
    mid = 0.5 * (lo + hi)
    left, right = _gl(f, lo, mid), _gl(f, mid, hi)
    if abs(left + right - whole) <= tol or depth >= 20:
        return left + right
    return _adaptive_gl(f, lo, mid, tol / 2, depth + 1) + _adaptive_gl(f, mid, hi, tol / 2, depth + 1)


class MarchenkoPasturCDF:
    """CDF of the MP law (with the atom at 0 when gamma < 1).

    The bulk integral uses x = a + (b - a) sin^2(theta), which removes the
    square-root endpoint behaviour and leaves a smooth integrand in theta.
    """

    def __init__(self, gamma, panels=32):
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        self.gamma = gamma
        self.a, self.b = mp_edges(gamma)
        self.atom = max(0.0, 1.0 - gamma)
        self._edges = np.linspace(0.0, 0.5 * math.pi, panels + 1)
        pieces = [_adaptive_gl(self._integrand, lo, hi)
                  for lo, hi in zip(self._edges[:-1], self._edges[1:])]
        self._cum = np.concatenate([[0.0], np.cumsum(pieces)])

    def _integrand(self, theta):
        a, b, g = self.a, self.b, self.gamma
        s2 = np.sin(theta) ** 2
        c2 = np.cos(theta) ** 2
        if a == 0.0:
            # x = b s2: sqrt((b-x)x)/x dx = 2 b c2 dtheta
            return g / (2 * math.pi) * 2.0 * b * c2
        x = a + (b - a) * s2
        return g / (2 * math.pi * x) * 2.0 * (b - a) ** 2 * s2 * c2

    def _theta(self, x):
        return math.asin(math.sqrt(min(max((x - self.a) / (self.b - self.a), 0.0), 1.0)))

    def _scalar(self, x):
        if x < 0.0:
            return 0.0
        if x < self.a:
            return self.atom
        if x >= self.b:
            return self.atom + self._cum[-1]
        th = self._theta(x)
        k = min(int(np.searchsorted(self._edges, th, side="right")) - 1, len(self._edges) - 2)
        return self.atom + self._cum[k] + _adaptive_gl(self._integrand, self._edges[k], th)

    def __call__(self, x):
        if np.ndim(x) == 0:
            return self._scalar(float(x))
        return np.array([self._scalar(float(v)) for v in np.ravel(x)]).reshape(np.shape(x))

    def left_limit(self, x):
        # the only jump is the atom at 0
        if np.ndim(x) == 0:
            return 0.0 if x <= 0.0 else self._scalar(float(x))
        return np.array([self.left_limit(float(v)) for v in np.ravel(x)]).reshape(np.shape(x))

    def quantile(self, prob):
        if not 0.0 < prob < 1.0:
            raise ValueError("prob must lie in (0, 1)")
        if prob <= self.atom:
            return 0.0
        return brentq(lambda x: self._scalar(x) - prob, self.a, self.b, xtol=1e-15, rtol=1e-15)


@functools.lru_cache(maxsize=32)
def mp_cdf(gamma) -> MarchenkoPasturCDF:
    return MarchenkoPasturCDF(float(gamma))


def mp_distance(esd, gamma) -> float:
    """Sup-norm distance between an empirical spectral CDF and the MP CDF.

    Both CDFs are monotone and the MP CDF is continuous away from 0, so the
    supremum is attained at a jump of the empirical CDF (either side) or at
    the MP atom.
    """
    cdf = mp_cdf(gamma)
    pts = np.unique(esd.points)
    upper = esd(pts)
    lower = esd.left_limit(pts)
    f_at = cdf(pts)
    f_left = cdf.left_limit(pts)
    dist = max(np.max(np.abs(upper - f_at)), np.max(np.abs(lower - f_left)))
    if cdf.atom > 0.0:
        dist = max(dist, abs(float(esd(0.0)) - cdf(0.0)), abs(float(esd.left_limit(0.0))))
    return float(dist)
