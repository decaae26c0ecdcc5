"""Dyck-path generating functions and exact trace-moment path sums.

g_m(y) sums y^{#(X)} over Dyck paths X of length 2m, where #(X) counts the
up-steps taken at even times t = 0, 2, 4, ...; g'_m(y) counts up-steps at odd
times instead. Both are computed exactly with Python integers.

E Trace A^m for A = X^T X is the sum over closed paths i_0, i_1, ..., i_{2m-1}
that alternate between row indices (even times, in 1..n) and column indices
(odd times, in 1..p). Step t uses the entry x[row, col] of the two vertices it
joins; entries are independent, so a path contributes the product of
E x^{c} over the distinct entries it uses, c being the multiplicity. Paths are
enumerated up to relabelling of rows and columns (labels in order of first
appearance) and weighted by the number of labellings, n (n-1) ... times
p (p-1) ...; odd-multiplicity branches are cut as soon as too few steps
remain to make every multiplicity even.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .ensembles import EntryDistribution, entry_moment

M_MAX = 60
PATH_M_MAX = 5
PATH_NP_MAX = 20


def catalan(m: int) -> int:
    return math.comb(2 * m, m) // (m + 1)


@dataclass(frozen=True)
class DyckPolynomial:
    """Integer polynomial in y; coeffs[j] is the coefficient of y^j."""

    m: int
    coeffs: tuple

    def __call__(self, y):
        out = 0
        for c in reversed(self.coeffs):
            out = out * y + c
        return out

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __str__(self):
        terms = [f"{c}*y^{j}" for j, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) or "0"


def _dyck_tables(m_max, parity):
    """Weighted Dyck polynomials by DP over (time, height).

    ``parity`` 0 weights up-steps at even times, 1 at odd times.
    """
    if not 0 <= m_max <= M_MAX:
        raise ValueError(f"m_max must lie in 0..{M_MAX}")
    out = [DyckPolynomial(0, (1,))]
    # state[h] = coefficient list of the weight polynomial
    state = {0: [1]}
    for t in range(2 * m_max):
        nxt = {}
        weighted = (t % 2) == parity
        for h, poly in state.items():
            up = [0] + poly if weighted else poly
            _add_into(nxt, h + 1, up)
            if h > 0:
                _add_into(nxt, h - 1, poly)
        # prune heights that cannot return to 0 in time
        left = 2 * m_max - (t + 1)
        state = {h: p for h, p in nxt.items() if h <= left}
        if (t + 1) % 2 == 0:
            poly = state.get(0, [0])
            out.append(DyckPolynomial((t + 1) // 2, tuple(_trim(poly))))
    return out


def _add_into(table, key, poly):
    cur = table.get(key)
    if cur is None:
        table[key] = list(poly)
        return
    if len(cur) < len(poly):
        cur.extend([0] * (len(poly) - len(cur)))
    for i, c in enumerate(poly):
        cur[i] += c


def _trim(poly):
    poly = list(poly)
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return poly


def dyck_polynomials(m_max: int):
    """[g_0, g_1, ..., g_{m_max}] (even-time up-steps)."""
    return _dyck_tables(m_max, 0)


def gprime_polynomials(m_max: int):
    """[g'_0, ..., g'_{m_max}] (odd-time up-steps)."""
    return _dyck_tables(m_max, 1)


def dyck_bruteforce(m: int, parity: int = 0) -> DyckPolynomial:
    """Same polynomial by filtering all 2^{2m} step sequences."""
    coeffs = [0] * (m + 1)
    for steps in itertools.product((1, -1), repeat=2 * m):
        h, count, ok = 0, 0, True
        for t, s in enumerate(steps):
            h += s
            if h < 0:
                ok = False
                break
            if s == 1 and t % 2 == parity:
                count += 1
        if ok and h == 0:
            coeffs[count] += 1
    return DyckPolynomial(m, tuple(_trim(coeffs)))


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sum(polys):
    out = [0]
    for p in polys:
        if len(p) > len(out):
            out.extend([0] * (len(p) - len(out)))
        for i, c in enumerate(p):
            out[i] += c
    return out


@dataclass
class FunctionalEquationReport:
    m_max: int
    passed: bool
    first_failure: Optional[tuple] = None  # (m, y-degree, which equation)
    checked: int = 0

    def __str__(self):
        if self.passed:
            return f"functional equations hold for m <= {self.m_max} ({self.checked} coefficients)"
        m, deg, which = self.first_failure
        return f"functional equation for {which} fails at m={m}, y^{deg}"


def verify_functional_equation(m_max: int, g=None, gprime=None) -> FunctionalEquationReport:
    """Check g_m = y sum g'_a g_b and g'_m = sum g'_a g_b (a + b = m - 1) exactly.

    ``g``/``gprime`` default to the DP tables; passing altered lists lets the
    checker be tested against deliberate corruption.
    """
    if m_max < 2:
        raise ValueError("m_max must be >= 2")
    g = g if g is not None else dyck_polynomials(m_max)
    gp = gprime if gprime is not None else gprime_polynomials(m_max)
    checked = 0
    for m in range(1, m_max + 1):
        conv = _poly_sum(_poly_mul(list(gp[a].coeffs), list(g[m - 1 - a].coeffs)) for a in range(m))
        for which, target, expect in (("g", g[m], [0] + conv), ("g'", gp[m], conv)):
            have = list(target.coeffs)
            width = max(len(have), len(expect))
            have += [0] * (width - len(have))
            exp = expect + [0] * (width - len(expect))
            for deg in range(width):
                checked += 1
                if have[deg] != exp[deg]:
                    return FunctionalEquationReport(m_max, False, (m, deg, which), checked)
    return FunctionalEquationReport(m_max, True, None, checked)


def gm_asymptotic(m: int, y: float) -> float:
    """Leading term y^{1/4} (sqrt y + 1) / (2 sqrt pi) * (sqrt y + 1)^{2m} / m^{3/2}."""
    if y <= 0 or m < 1:
        raise ValueError("need y > 0 and m >= 1")
    r = math.sqrt(y) + 1.0
    return y ** 0.25 * r / (2.0 * math.sqrt(math.pi)) * r ** (2 * m) / m ** 1.5


def theorem3_constant(gamma: float) -> float:
    """(sqrt(gamma) + 1) gamma^{1/4} / (2 sqrt(pi))."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    return (math.sqrt(gamma) + 1.0) * gamma ** 0.25 / (2.0 * math.sqrt(math.pi))


# ---------------------------------------------------------------------------
# exact path sums

@dataclass(frozen=True)
class PathSumSpec:
    n: int
    p: int
    m: int
    moments: dict = field(hash=False)

    def __post_init__(self):
        for name in ("n", "p", "m"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.m > PATH_M_MAX or self.n * self.p > PATH_NP_MAX:
            raise ValueError(
                f"path sum too large: need 2m <= {2 * PATH_M_MAX} and n*p <= {PATH_NP_MAX}")
        for k in range(1, 2 * self.m + 1):
            if k not in self.moments:
                raise ValueError(f"moment of order {k} missing")
            if k % 2 == 1 and self.moments[k] != 0:
                raise ValueError(f"odd moment of order {k} must vanish")
        if self.moments[2] != 1:
            raise ValueError("second moment must equal 1")

    @classmethod
    def from_distribution(cls, dist: EntryDistribution, n: int, p: int, m: int):
        return cls(n, p, m, {k: entry_moment(dist, k) for k in range(1, 2 * m + 1)})


def _falling(x, k):
    out = 1
    for i in range(k):
        out *= x - i
    return out


def _normalise(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v


def _score(counts, moments):
    out = 1
    for c in counts.values():
        mom = moments[c]
        if mom == 0:
            return 0
        out *= mom
    return out


def expected_trace_exact(spec: PathSumSpec):
    """E Trace (X^T X)^m by canonical closed-path enumeration (exact)."""
    n, p, m, moments = spec.n, spec.p, spec.m, spec.moments
    length = 2 * m
    counts = {}
    odd = [0]
    total = [0]
    path = [0] * length  # path[0] = row 0

    def touch(entry, delta):
        c = counts.get(entry, 0) + delta
        if c:
            counts[entry] = c
        else:
            del counts[entry]
        odd[0] += 1 if c % 2 else -1

    def rec(t, rows, cols):
        # path[t] is fixed; choose path[t + 1]
        remaining = length - t
        if odd[0] > remaining:
            return
        if t == length - 1:
            entry = (0, path[t])
            touch(entry, 1)
            if odd[0] == 0:
                w = _score(counts, moments)
                if w:
                    total[0] += w * _falling(n, rows) * _falling(p, cols)
            touch(entry, -1)
            return
        if t % 2 == 0:  # row -> column
            for c in range(min(cols + 1, p)):
                entry = (path[t], c)
                touch(entry, 1)
                path[t + 1] = c
                rec(t + 1, rows, max(cols, c + 1))
                touch(entry, -1)
        else:  # column -> row
            for r in range(min(rows + 1, n)):
                entry = (r, path[t])
                touch(entry, 1)
                path[t + 1] = r
                rec(t + 1, max(rows, r + 1), cols)
                touch(entry, -1)

    rec(0, 1, 0)
    return _normalise(total[0])


def expected_trace_bruteforce(spec: PathSumSpec):
    """Plain enumeration over every labelled closed path (small cases only)."""
    n, p, m, moments = spec.n, spec.p, spec.m, spec.moments
    total = 0
    for rows in itertools.product(range(n), repeat=m):
        for cols in itertools.product(range(p), repeat=m):
            counts = {}
            for k in range(m):
                for entry in ((rows[k], cols[k]), (rows[(k + 1) % m], cols[k])):
                    counts[entry] = counts.get(entry, 0) + 1
            total += _score(counts, moments)
    return _normalise(total)


def expected_wigner_trace_exact(n: int, two_m: int, moments):
    """E Trace M^{2m} for the n x n symmetric matrix with i.i.d. y_ij (i <= j)."""
    counts = {}
    odd = [0]
    total = [0]
    path = [0] * two_m

    def touch(edge, delta):
        c = counts.get(edge, 0) + delta
        if c:
            counts[edge] = c
        else:
            del counts[edge]
        odd[0] += 1 if c % 2 else -1

    def rec(t, used):
        remaining = two_m - t
        if odd[0] > remaining:
            return
        a = path[t]
        if t == two_m - 1:
            edge = (min(a, 0), max(a, 0))
            touch(edge, 1)
            if odd[0] == 0:
                w = _score(counts, moments)
                if w:
                    total[0] += w * _falling(n, used)
            touch(edge, -1)
            return
        for b in range(min(used + 1, n)):
            edge = (min(a, b), max(a, b))
            touch(edge, 1)
            path[t + 1] = b
            rec(t + 1, max(used, b + 1))
            touch(edge, -1)

    rec(0, 1)
    return _normalise(total[0])


@dataclass(frozen=True)
class DominationResult:
    lhs: object
    rhs: object
    passed: bool


def wigner_domination_check(spec: PathSumSpec) -> DominationResult:
    """E Tr A^m <= E Tr M^{2m}, both sides exact.

    The comparison embeds X in a square array, so M is max(n, p) x max(n, p);
    for p > n this is the n >= p statement applied to X^T (same traces).
    """
    lhs = expected_trace_exact(spec)
    rhs = expected_wigner_trace_exact(max(spec.n, spec.p), 2 * spec.m, spec.moments)
    return DominationResult(lhs, rhs, lhs <= rhs)
