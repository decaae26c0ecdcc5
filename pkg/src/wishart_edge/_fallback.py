"""Pure-Python kernels for the singular value pipeline.

Same algorithms and interfaces as the compiled ``_kernels`` extension; used
when the extension is not built or ``WISHART_EDGE_PURE=1`` is set.
"""
import math

import numpy as np


class ConvergenceError(RuntimeError):
    pass


def _householder(x):
    """Reflector ``v`` (unit 2-norm) and ``alpha`` with (I - 2 v v^H) x = alpha e1."""
    norm = np.linalg.norm(x)
    if norm == 0.0:
        return None, 0.0
    x0 = x[0]
    if x0 == 0:
        phase = 1.0
    else:
        phase = x0 / abs(x0)
    alpha = -phase * norm
    v = x.copy()
    v[0] -= alpha
    v /= np.linalg.norm(v)
    return v, alpha


def bidiagonalize(a):
    """Householder reduction of a tall matrix to upper bidiagonal form.

    Works in place on a copy of ``a`` (real or complex, rows >= columns) and
    returns the moduli of the diagonal and superdiagonal. Unitary diagonal
    scalings do not change singular values, so the moduli suffice.
    """
    a = np.array(a, copy=True)
    m, n = a.shape
    d = np.zeros(n, dtype=a.dtype)
    e = np.zeros(max(n - 1, 0), dtype=a.dtype)
    for k in range(n):
        v, alpha = _householder(a[k:, k])
        if v is not None:
            w = v.conj() @ a[k:, k + 1:]
            a[k:, k + 1:] -= 2.0 * np.outer(v, w)
        d[k] = alpha
        if k < n - 1:
            # reflect conj(row) so that row @ H has a single leading entry
            u, beta = _householder(a[k, k + 1:].conj())
            if u is not None:
                s = a[k + 1:, k + 1:] @ u
                a[k + 1:, k + 1:] -= 2.0 * np.outer(s, u.conj())
            e[k] = np.conj(beta)
    return np.abs(d), np.abs(e)


def _givens(f, g):
    if g == 0.0:
        return 1.0, 0.0, f
    if f == 0.0:
        return 0.0, 1.0, g
    r = math.hypot(f, g)
    return f / r, g / r, r


def bidiagonal_singular_values(d, e, tol=1e-14, sweep_factor=30):
    """Singular values of the upper bidiagonal matrix (d, e).

    Implicit-shift Golub-Kahan QR with Wilkinson shifts and zero-diagonal
    chasing. Raises ConvergenceError after ``sweep_factor * n`` QR steps.
    """
    d = [float(x) for x in d]
    e = [float(x) for x in e]
    n = len(d)
    if n == 0:
        return np.zeros(0)
    scale = max([abs(x) for x in d] + [abs(x) for x in e])
    if scale == 0.0:
        return np.zeros(n)
    d = [x / scale for x in d]
    e = [x / scale for x in e]
    tiny = tol * max([abs(x) for x in d] + [abs(x) for x in e])

    max_steps = sweep_factor * n
    steps = 0
    hi = n - 1
    while hi > 0:
        for i in range(hi):
            if abs(e[i]) <= tol * (abs(d[i]) + abs(d[i + 1])):
                e[i] = 0.0
        while hi > 0 and e[hi - 1] == 0.0:
            hi -= 1
        if hi == 0:
            break
        lo = hi - 1
        while lo > 0 and e[lo - 1] != 0.0:
            lo -= 1

        zero_row = -1
        for k in range(lo, hi):
            if abs(d[k]) <= tiny:
                zero_row = k
                break
        if zero_row >= 0:
            # rotate rows to push e[k] off the matrix
            k = zero_row
            d[k] = 0.0
            f = e[k]
            e[k] = 0.0
            for j in range(k + 1, hi + 1):
                c, s, r = _givens(d[j], f)
                d[j] = r
                if j < hi:
                    f = -s * e[j]
                    e[j] = c * e[j]
            continue
        if abs(d[hi]) <= tiny:
            d[hi] = 0.0
            f = e[hi - 1]
            e[hi - 1] = 0.0
            for j in range(hi - 1, lo - 1, -1):
                c, s, r = _givens(d[j], f)
                d[j] = r
                if j > lo:
                    f = -s * e[j - 1]
                    e[j - 1] = c * e[j - 1]
            continue

        steps += 1
        if steps > max_steps:
            raise ConvergenceError(
                f"bidiagonal QR did not converge in {max_steps} steps (n={n})")

        # Wilkinson shift from the trailing 2x2 block of B^T B
        dm, dn, em = d[hi - 1], d[hi], e[hi - 1]
        el = e[hi - 2] if hi - 1 > lo else 0.0
        t11 = dm * dm + el * el
        t12 = dm * em
        t22 = dn * dn + em * em
        delta = 0.5 * (t11 - t22)
        denom = delta + math.copysign(math.hypot(delta, t12), delta)
        shift = t22 - t12 * t12 / denom if denom != 0.0 else t22

        y = d[lo] * d[lo] - shift
        z = d[lo] * e[lo]
        for k in range(lo, hi):
            c, s, r = _givens(y, z)
            if k > lo:
                e[k - 1] = r
            y = c * d[k] + s * e[k]
            e[k] = -s * d[k] + c * e[k]
            z = s * d[k + 1]
            d[k + 1] = c * d[k + 1]
            c, s, r = _givens(y, z)
            d[k] = r
            y = c * e[k] + s * d[k + 1]
            d[k + 1] = -s * e[k] + c * d[k + 1]
            if k < hi - 1:
                z = s * e[k + 1]
                e[k + 1] = c * e[k + 1]
        e[hi - 1] = y

    return np.array([abs(x) * scale for x in d])


def singular_values(a):
    """Unsorted singular values of a tall matrix."""
    d, e = bidiagonalize(a)
    return bidiagonal_singular_values(d, e)
