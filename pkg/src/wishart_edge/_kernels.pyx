# cython: language_level=3
"""Compiled kernels: Householder bidiagonalization and bidiagonal QR.

Mirrors ``_fallback``; the two are checked against each other in the tests.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, hypot, copysign

cnp.import_array()


class ConvergenceError(RuntimeError):
    pass


cdef void _bidiag_real(double[:, ::1] a, double[::1] d, double[::1] e,
                       double[::1] v, double[::1] w) noexcept nogil:
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double norm, alpha, vnorm, s
    for k in range(n):
        # left reflector on column k
        norm = 0.0
        for i in range(k, m):
            norm += a[i, k] * a[i, k]
        norm = sqrt(norm)
        if norm == 0.0:
            d[k] = 0.0
        else:
            alpha = -copysign(norm, a[k, k])
            vnorm = 0.0
            for i in range(k, m):
                v[i] = a[i, k]
            v[k] -= alpha
            for i in range(k, m):
                vnorm += v[i] * v[i]
            vnorm = sqrt(vnorm)
            for i in range(k, m):
                v[i] /= vnorm
            for j in range(k + 1, n):
                w[j] = 0.0
            for i in range(k, m):
                s = v[i]
                for j in range(k + 1, n):
                    w[j] += s * a[i, j]
            for i in range(k, m):
                s = 2.0 * v[i]
                for j in range(k + 1, n):
                    a[i, j] -= s * w[j]
            d[k] = fabs(alpha)
        if k >= n - 1:
            continue
        # right reflector on row k
        norm = 0.0
        for j in range(k + 1, n):
            norm += a[k, j] * a[k, j]
        norm = sqrt(norm)
        if norm == 0.0:
            e[k] = 0.0
            continue
        alpha = -copysign(norm, a[k, k + 1])
        for j in range(k + 1, n):
            v[j] = a[k, j]
        v[k + 1] -= alpha
        vnorm = 0.0
        for j in range(k + 1, n):
            vnorm += v[j] * v[j]
        vnorm = sqrt(vnorm)
        for j in range(k + 1, n):
            v[j] /= vnorm
        for i in range(k + 1, m):
            s = 0.0
            for j in range(k + 1, n):
                s += a[i, j] * v[j]
            s *= 2.0
            for j in range(k + 1, n):
                a[i, j] -= s * v[j]
        e[k] = fabs(alpha)


cdef void _bidiag_complex(double[:, ::1] a, double[::1] d, double[::1] e,
                          double[::1] v, double[::1] w) noexcept nogil:
    # a holds interleaved (re, im) pairs: shape (m, 2 n)
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1] // 2
    cdef Py_ssize_t i, j, k
    cdef double norm, mod, ph_re, ph_im, al_re, al_im, vnorm
    cdef double vr, vi, ar, ai, sr, si
    for k in range(n):
        norm = 0.0
        for i in range(k, m):
            norm += a[i, 2 * k] * a[i, 2 * k] + a[i, 2 * k + 1] * a[i, 2 * k + 1]
        norm = sqrt(norm)
        if norm == 0.0:
            d[k] = 0.0
        else:
            ar = a[k, 2 * k]
            ai = a[k, 2 * k + 1]
            mod = hypot(ar, ai)
            if mod == 0.0:
                ph_re = 1.0
                ph_im = 0.0
            else:
                ph_re = ar / mod
                ph_im = ai / mod
            al_re = -ph_re * norm
            al_im = -ph_im * norm
            for i in range(k, m):
                v[2 * i] = a[i, 2 * k]
                v[2 * i + 1] = a[i, 2 * k + 1]
            v[2 * k] -= al_re
            v[2 * k + 1] -= al_im
            vnorm = 0.0
            for i in range(k, m):
                vnorm += v[2 * i] * v[2 * i] + v[2 * i + 1] * v[2 * i + 1]
            vnorm = sqrt(vnorm)
            for i in range(k, m):
                v[2 * i] /= vnorm
                v[2 * i + 1] /= vnorm
            # w = v^H a[k:, k+1:]
            for j in range(k + 1, n):
                w[2 * j] = 0.0
                w[2 * j + 1] = 0.0
            for i in range(k, m):
                vr = v[2 * i]
                vi = v[2 * i + 1]
                for j in range(k + 1, n):
                    ar = a[i, 2 * j]
                    ai = a[i, 2 * j + 1]
                    w[2 * j] += vr * ar + vi * ai
                    w[2 * j + 1] += vr * ai - vi * ar
            # a -= 2 v w
            for i in range(k, m):
                vr = 2.0 * v[2 * i]
                vi = 2.0 * v[2 * i + 1]
                for j in range(k + 1, n):
                    sr = w[2 * j]
                    si = w[2 * j + 1]
                    a[i, 2 * j] -= vr * sr - vi * si
                    a[i, 2 * j + 1] -= vr * si + vi * sr
            d[k] = norm
        if k >= n - 1:
            continue
        norm = 0.0
        for j in range(k + 1, n):
            norm += a[k, 2 * j] * a[k, 2 * j] + a[k, 2 * j + 1] * a[k, 2 * j + 1]
        norm = sqrt(norm)
        if norm == 0.0:
            e[k] = 0.0
            continue
        # reflector for conj(row k)
        ar = a[k, 2 * (k + 1)]
        ai = -a[k, 2 * (k + 1) + 1]
        mod = hypot(ar, ai)
        if mod == 0.0:
            ph_re = 1.0
            ph_im = 0.0
        else:
            ph_re = ar / mod
            ph_im = ai / mod
        al_re = -ph_re * norm
        al_im = -ph_im * norm
        for j in range(k + 1, n):
            v[2 * j] = a[k, 2 * j]
            v[2 * j + 1] = -a[k, 2 * j + 1]
        v[2 * (k + 1)] -= al_re
        v[2 * (k + 1) + 1] -= al_im
        vnorm = 0.0
        for j in range(k + 1, n):
            vnorm += v[2 * j] * v[2 * j] + v[2 * j + 1] * v[2 * j + 1]
        vnorm = sqrt(vnorm)
        for j in range(k + 1, n):
            v[2 * j] /= vnorm
            v[2 * j + 1] /= vnorm
        # rows: a_i -= 2 (a_i . u) u^H
        for i in range(k + 1, m):
            sr = 0.0
            si = 0.0
            for j in range(k + 1, n):
                ar = a[i, 2 * j]
                ai = a[i, 2 * j + 1]
                vr = v[2 * j]
                vi = v[2 * j + 1]
                sr += ar * vr - ai * vi
                si += ar * vi + ai * vr
            sr *= 2.0
            si *= 2.0
            for j in range(k + 1, n):
                vr = v[2 * j]
                vi = -v[2 * j + 1]
                a[i, 2 * j] -= sr * vr - si * vi
                a[i, 2 * j + 1] -= sr * vi + si * vr
        e[k] = norm


cdef inline void _givens(double f, double g, double* c, double* s, double* r) noexcept nogil:
    cdef double h
    if g == 0.0:
        c[0] = 1.0
        s[0] = 0.0
        r[0] = f
    elif f == 0.0:
        c[0] = 0.0
        s[0] = 1.0
        r[0] = g
    else:
        h = hypot(f, g)
        c[0] = f / h
        s[0] = g / h
        r[0] = h


cdef long _bidiag_qr(double[::1] d, double[::1] e, double tol, long max_steps) noexcept nogil:
    """Returns the number of QR steps taken, or -1 when max_steps is exceeded."""
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t i, j, k, lo, hi, zero_row
    cdef double tiny = 0.0, c, s, r, f, y, z
    cdef double dm, dn, em, el, t11, t12, t22, delta, denom, shift
    cdef long steps = 0
    for i in range(n):
        if fabs(d[i]) > tiny:
            tiny = fabs(d[i])
    for i in range(n - 1):
        if fabs(e[i]) > tiny:
            tiny = fabs(e[i])
    tiny *= tol
    hi = n - 1
    while hi > 0:
        for i in range(hi):
            if fabs(e[i]) <= tol * (fabs(d[i]) + fabs(d[i + 1])):
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
            if fabs(d[k]) <= tiny:
                zero_row = k
                break
        if zero_row >= 0:
            k = zero_row
            d[k] = 0.0
            f = e[k]
            e[k] = 0.0
            for j in range(k + 1, hi + 1):
                _givens(d[j], f, &c, &s, &r)
                d[j] = r
                if j < hi:
                    f = -s * e[j]
                    e[j] = c * e[j]
            continue
        if fabs(d[hi]) <= tiny:
            d[hi] = 0.0
            f = e[hi - 1]
            e[hi - 1] = 0.0
            j = hi - 1
            while j >= lo:
                _givens(d[j], f, &c, &s, &r)
                d[j] = r
                if j > lo:
                    f = -s * e[j - 1]
                    e[j - 1] = c * e[j - 1]
                j -= 1
            continue

        steps += 1
        if steps > max_steps:
            return -1

        dm = d[hi - 1]
        dn = d[hi]
        em = e[hi - 1]
        el = e[hi - 2] if hi - 1 > lo else 0.0
        t11 = dm * dm + el * el
        t12 = dm * em
        t22 = dn * dn + em * em
        delta = 0.5 * (t11 - t22)
        denom = delta + copysign(hypot(delta, t12), delta)
        if denom != 0.0:
            shift = t22 - t12 * t12 / denom
        else:
            shift = t22

        y = d[lo] * d[lo] - shift
        z = d[lo] * e[lo]
        for k in range(lo, hi):
            _givens(y, z, &c, &s, &r)
            if k > lo:
                e[k - 1] = r
            y = c * d[k] + s * e[k]
            e[k] = -s * d[k] + c * e[k]
            z = s * d[k + 1]
            d[k + 1] = c * d[k + 1]
            _givens(y, z, &c, &s, &r)
            d[k] = r
            y = c * e[k] + s * d[k + 1]
            d[k + 1] = -s * e[k] + c * d[k + 1]
            if k < hi - 1:
                z = s * e[k + 1]
                e[k + 1] = c * e[k + 1]
        e[hi - 1] = y
    return steps


def bidiagonalize(a):
    """Moduli (d, e) of the upper bidiagonal form of a tall real or complex matrix."""
    cdef Py_ssize_t m, n
    cdef double[:, ::1] wv
    cdef double[::1] dv, ev, vv, ww
    arr = np.asarray(a)
    m = arr.shape[0]
    n = arr.shape[1]
    d = np.zeros(n)
    e = np.zeros(max(n - 1, 0))
    if np.iscomplexobj(arr):
        work = np.ascontiguousarray(arr, dtype=np.complex128).view(np.float64).copy()
        vv = np.zeros(2 * max(m, n))
        ww = np.zeros(2 * max(m, n))
        wv = work
        dv = d
        ev = e
        with nogil:
            _bidiag_complex(wv, dv, ev, vv, ww)
    else:
        work = np.array(arr, dtype=np.float64, order="C", copy=True)
        vv = np.zeros(max(m, n))
        ww = np.zeros(max(m, n))
        wv = work
        dv = d
        ev = e
        with nogil:
            _bidiag_real(wv, dv, ev, vv, ww)
    return d, e


def bidiagonal_singular_values(d, e, double tol=1e-14, long sweep_factor=30):
    """Singular values of the upper bidiagonal matrix (d, e); see _fallback."""
    cdef double[::1] dv
    cdef double[::1] ev
    cdef long steps, max_steps
    cdef double scale
    dd = np.abs(np.array(d, dtype=np.float64))
    ee = np.abs(np.array(e, dtype=np.float64))
    n = dd.shape[0]
    if n == 0:
        return dd
    scale = max(dd.max(), ee.max() if ee.size else 0.0)
    if scale == 0.0:
        return np.zeros(n)
    dd /= scale
    ee /= scale
    dv = dd
    ev = ee
    max_steps = sweep_factor * n
    with nogil:
        steps = _bidiag_qr(dv, ev, tol, max_steps)
    if steps < 0:
        raise ConvergenceError(
            f"bidiagonal QR did not converge in {max_steps} steps (n={n})")
    return np.abs(dd) * scale


def singular_values(a):
    """Unsorted singular values of a tall matrix."""
    d, e = bidiagonalize(a)
    return bidiagonal_singular_values(d, e)
