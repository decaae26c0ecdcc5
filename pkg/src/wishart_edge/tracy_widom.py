"""Hastings-McLeod solution of Painleve II and the Tracy-Widom laws F1, F2.

With q the solution of q'' = x q + 2 q^3, q ~ Ai at +infinity, define

    u(x) = int_x^inf q^2,   I(x) = int_x^inf (t - x) q^2(t) dt,   J(x) = int_x^inf q.

Then F2 = exp(-I) and F1 = exp(-(I + J) / 2), with densities F2' = u F2 and
F1' = (u + q) F1 / 2. All five quantities are carried as one ODE state and
integrated backward from x0 by an adaptive Dormand-Prince 5(4) scheme.
Beyond x0 the solution equals Ai to O(Ai^3), so the tails are closed-form:

    u(x0) = Ai'(x0)^2 - x0 Ai(x0)^2
    I(x0) = (2 x0^2 Ai^2 - 2 x0 Ai'^2 - Ai Ai') / 3
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .airy import ai_upper_tail, airy_arrays

X0 = 8.0
DOMAIN = (-10.0, 10.0)
BLOWUP = 1e6
DEFAULT_GRID = np.round(np.arange(-10.0, 6.0 + 1e-9, 0.02), 10)


class PainleveBlowUp(ArithmeticError):
    """The backward integration left the Hastings-McLeod separatrix."""


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def _rhs(x, y):
    q, qp, u = y[0], y[1], y[2]
    return np.array([qp, x * q + 2.0 * q ** 3, -q * q, -u, -q])


def _dp45(f, x_start, y_start, targets, rtol, atol, h0=-1e-3):
    """Integrate y' = f(x, y) from x_start through each of ``targets`` (monotone).

    Steps are clipped to land exactly on each target. Returns the states at the
    targets. Raises PainleveBlowUp when |q| exceeds BLOWUP.
    """
    x, y = x_start, np.array(y_start, dtype=float)
    direction = -1.0 if h0 < 0 else 1.0
    h = h0
    k1 = f(x, y)
    out = []
    last_ok = x
    for target in targets:
        while (target - x) * direction > 1e-15:
            h = direction * min(abs(h), abs(target - x))
            k = [k1]
            for i in range(1, 7):
                yi = y + h * sum(a * kj for a, kj in zip(_A[i], k))
                k.append(f(x + _C[i] * h, yi))
            ks = np.array(k)
            y_new = y + h * (_B5 @ ks)
            err = h * (_E @ ks)
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            ratio = float(np.max(np.abs(err) / scale))
            if ratio <= 1.0:
                x = target if abs(target - (x + h)) < 1e-14 else x + h
                y = y_new
                k1 = ks[6]  # first-same-as-last
                if not np.all(np.isfinite(y)) or abs(y[0]) > BLOWUP:
                    raise PainleveBlowUp(
                        f"Hastings-McLeod integration blew up below x={last_ok:.6g}")
                last_ok = x
            fac = 0.9 * ratio ** -0.2 if ratio > 0 else 5.0
            h *= min(5.0, max(0.2, fac))
            if abs(h) < 1e-12:
                raise PainleveBlowUp(
                    f"step size underflow; last valid point x={last_ok:.6g}")
        out.append(y.copy())
    return out


def _airy_tail_state(x):
    """(q, q', u, I, J) on x >= x0 where q = Ai to within O(Ai^3)."""
    a, ap = (float(v[0]) for v in airy_arrays(np.array([x])))
    u = ap * ap - x * a * a
    i_ = (2.0 * x * x * a * a - 2.0 * x * ap * ap - a * ap) / 3.0
    return np.array([a, ap, u, i_, ai_upper_tail(x)])


def _validate_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-d array")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly ascending")
    if grid[0] < DOMAIN[0] or grid[-1] > DOMAIN[1]:
        raise ValueError(f"grid must lie in [{DOMAIN[0]:g}, {DOMAIN[1]:g}]")
    return grid


def _solve(grid, x0=X0, rtol=1e-12, atol=1e-300):
    grid = _validate_grid(grid)
    states = np.empty((grid.size, 5))
    right = grid >= x0
    for i in np.nonzero(right)[0]:
        states[i] = _airy_tail_state(grid[i])
    left = np.nonzero(~right)[0][::-1]
    if left.size:
        sols = _dp45(_rhs, x0, _airy_tail_state(x0), grid[left], rtol, atol)
        for i, s in zip(left, sols):
            states[i] = s
    return grid, states


def hastings_mcleod(grid, x0=X0, rtol=1e-12):
    """q on an ascending grid in [-10, 10]."""
    return _solve(grid, x0=x0, rtol=rtol)[1][:, 0].copy()


@dataclass(frozen=True)
class TWTable:
    """Tracy-Widom F1 and F2 tabulated on an ascending grid.

    ``cdf``/``density`` interpolate between grid points with cubic Hermite
    splines built from the exact derivatives. Right of the grid the Airy tail
    formulas are used; left of it the CDF is reported as 0 only when the
    tabulated value has already fallen below 1e-15.
    """

    s: np.ndarray = field(repr=False)
    q: np.ndarray = field(repr=False)
    q_prime: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    I: np.ndarray = field(repr=False)  # noqa: E741
    J: np.ndarray = field(repr=False)
    F1: np.ndarray = field(repr=False)
    F2: np.ndarray = field(repr=False)
    f1: np.ndarray = field(repr=False)
    f2: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("s", "q", "q_prime", "u", "I", "J", "F1", "F2", "f1", "f2"):
            getattr(self, name).setflags(write=False)

    @functools.cached_property
    def _splines(self):
        return {1: CubicHermiteSpline(self.s, self.F1, self.f1),
                2: CubicHermiteSpline(self.s, self.F2, self.f2)}

    def _arrays(self, beta):
        if beta == 1:
            return self.F1, self.f1
        if beta == 2:
            return self.F2, self.f2
        raise ValueError(f"beta must be 1 or 2, got {beta!r}")

    def cdf(self, x, beta=2):
        vals, _ = self._arrays(beta)
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = np.empty_like(flat)
        lo, hi = self.s[0], self.s[-1]
        inside = (flat >= lo) & (flat <= hi)
        out[inside] = self._splines[beta](flat[inside])
        for i in np.nonzero(flat > hi)[0]:
            out[i] = _tail_cdf(flat[i], beta)
        below = flat < lo
        if np.any(below):
            if vals[0] > 1e-15:
                raise ValueError(f"argument below table start s={lo:g}")
            out[below] = 0.0
        out = np.clip(out, 0.0, 1.0)
        return out.reshape(x.shape) if x.ndim else float(out[0])

    def density(self, x, beta=2):
        self._arrays(beta)
        x = np.asarray(x, dtype=float)
        if np.any((x < self.s[0]) | (x > self.s[-1])):
            raise ValueError("density requested outside the table grid")
        out = self._splines[beta].derivative()(x)
        return out if x.ndim else float(out)

    def quantile(self, prob, beta=2):
        vals, _ = self._arrays(beta)
        if not 0.0 < prob < 1.0:
            raise ValueError("prob must lie in (0, 1)")
        if not vals[0] <= prob <= vals[-1]:
            raise ValueError(
                f"prob={prob} outside the table range [{vals[0]:.3g}, {vals[-1]:.12g}]")
        spl = self._splines[beta]
        k = int(np.searchsorted(vals, prob))
        if vals[k] == prob:
            return float(self.s[k])
        lo, hi = self.s[max(k - 1, 0)], self.s[min(k, len(self.s) - 1)]
        return float(brentq(lambda t: float(spl(t)) - prob, lo, hi, xtol=1e-14, rtol=1e-15))

    def to_rows(self):
        return zip(self.s, self.q, self.F1, self.F2, self.f1, self.f2)


def _tail_cdf(x, beta):
    state = _airy_tail_state(x)
    i_, j_ = state[3], state[4]
    return math.exp(-i_) if beta == 2 else math.exp(-0.5 * (i_ + j_))


def tw_table(grid=None, x0=X0, rtol=1e-12) -> TWTable:
    grid = DEFAULT_GRID if grid is None else grid
    s, st = _solve(grid, x0=x0, rtol=rtol)
    q, qp, u, i_, j_ = (st[:, k].copy() for k in range(5))
    f2_cdf = np.exp(-i_)
    f1_cdf = np.exp(-0.5 * (i_ + j_))
    return TWTable(s=s.copy(), q=q, q_prime=qp, u=u, I=i_, J=j_,
                   F1=f1_cdf, F2=f2_cdf,
                   f1=0.5 * (u + q) * f1_cdf, f2=u * f2_cdf)


@functools.lru_cache(maxsize=1)
def default_table() -> TWTable:
    return tw_table()


def tw_cdf(x, beta=2):
    return default_table().cdf(x, beta)


def tw_quantile(prob, beta=2, table: TWTable | None = None):
    """Inverse Tracy-Widom CDF, |F(result) - prob| < 1e-6 on the table."""
    return (table or default_table()).quantile(prob, beta)
