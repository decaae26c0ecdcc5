import itertools
import math

import numpy as np
import pytest

from wishart_edge.combinatorics import (
    DyckPolynomial, PathSumSpec, catalan, dyck_bruteforce, dyck_polynomials, expected_trace_bruteforce,
    expected_trace_exact, expected_wigner_trace_exact, gm_asymptotic, gprime_polynomials,
    theorem3_constant, verify_functional_equation, wigner_domination_check)
from wishart_edge.ensembles import EntryDistribution, sample_matrix, EnsembleSpec

GAUSS = EntryDistribution.gaussian_real()
RADE = EntryDistribution.rademacher()


def test_small_polynomials():
    g, gp = dyck_polynomials(3), gprime_polynomials(3)
    assert g[0].coeffs == (1,) and gp[0].coeffs == (1,)
    assert g[1].coeffs == (0, 1) and gp[1].coeffs == (1,)
    assert g[2].coeffs == (0, 1, 1) and gp[2].coeffs == (1, 1)
    assert g[3].coeffs == (0, 1, 3, 1)
    assert str(g[2]) == "1*y^1 + 1*y^2"


def test_catalan_and_shift():
    g, gp = dyck_polynomials(40), gprime_polynomials(40)
    assert [catalan(m) for m in range(6)] == [1, 1, 2, 5, 14, 42]
    for m in range(41):
        assert g[m](1) == catalan(m) == gp[m](1)
    for m in range(1, 41):
        # every Dyck path starts with an up-step at t = 0, and the rest swap parity
        assert g[m].coeffs == (0,) + gp[m].coeffs


def test_bruteforce_agrees():
    g, gp = dyck_polynomials(8), gprime_polynomials(8)
    for m in range(9):
        assert g[m] == dyck_bruteforce(m, 0)
        assert gp[m] == dyck_bruteforce(m, 1)


def test_narayana_symmetry():
    # g'_m has Narayana coefficients, palindromic in y
    for poly in gprime_polynomials(12)[1:]:
        assert poly.coeffs == poly.coeffs[::-1]
        m = poly.m
        assert poly.coeffs == tuple(math.comb(m, k) * math.comb(m, k + 1) // m for k in range(m))


def test_functional_equation():
    rep = verify_functional_equation(15)
    assert rep.passed and rep.first_failure is None and rep.checked > 0
    assert "hold" in str(rep)
    with pytest.raises(ValueError):
        verify_functional_equation(1)


def test_functional_equation_catches_corruption():
    g = dyck_polynomials(8)
    bad = list(g)
    c = list(bad[5].coeffs)
    c[2] += 1
    bad[5] = DyckPolynomial(5, tuple(c))
    rep = verify_functional_equation(8, g=bad)
    assert not rep.passed and rep.first_failure == (5, 2, "g")
    gp = list(gprime_polynomials(8))
    c = list(gp[3].coeffs)
    c[0] -= 1
    gp[3] = DyckPolynomial(3, tuple(c))
    rep = verify_functional_equation(8, gprime=gp)
    assert not rep.passed and rep.first_failure[:2] in {(3, 0), (4, 1)}
    assert "fails" in str(rep)


@pytest.mark.parametrize("y", [1, 2, 4])
def test_asymptotic_ratio(y):
    g50 = dyck_polynomials(50)[50]
    assert g50(y) / gm_asymptotic(50, y) == pytest.approx(1.0, abs=0.05)


def test_asymptotic_ratio_converges():
    g = dyck_polynomials(60)
    err = [abs(g[m](2) / gm_asymptotic(m, 2) - 1) for m in (10, 20, 40, 60)]
    assert all(b < a for a, b in zip(err, err[1:]))


def test_log_growth():
    g = dyck_polynomials(60)
    for y in (1, 2, 4):
        rate = 2 * math.log(math.sqrt(y) + 1)
        # the m^{-3/2} prefactor makes log g_m / m approach the rate slowly
        raw = math.log(g[60](y)) / 60
        assert abs(raw - rate) < 0.12
        corrected = (math.log(g[60](y)) + 1.5 * math.log(60)) / 60
        assert abs(corrected - rate) < 0.02


def test_gm_asymptotic_errors():
    with pytest.raises(ValueError):
        gm_asymptotic(0, 1.0)
    with pytest.raises(ValueError):
        gm_asymptotic(5, 0.0)
    with pytest.raises(ValueError):
        dyck_polynomials(61)


def test_theorem3_constant():
    assert theorem3_constant(1.0) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-15)
    assert theorem3_constant(4.0) == pytest.approx(3 * math.sqrt(2) / (2 * math.sqrt(math.pi)), rel=1e-15)
    vals = [theorem3_constant(g) for g in np.linspace(0.1, 10, 50)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    for gamma in (0.5, 1.0, 3.0):
        m = 40
        ratio = gm_asymptotic(m, gamma) * m ** 1.5 / (math.sqrt(gamma) + 1) ** (2 * m)
        assert ratio == pytest.approx(theorem3_constant(gamma), rel=1e-12)
    with pytest.raises(ValueError):
        theorem3_constant(-1.0)


# exact path sums ---------------------------------------------------------

def test_path_sum_examples():
    assert expected_trace_exact(PathSumSpec.from_distribution(GAUSS, 2, 2, 2)) == 20
    assert expected_trace_exact(PathSumSpec.from_distribution(RADE, 2, 2, 2)) == 12
    assert expected_trace_exact(PathSumSpec.from_distribution(GAUSS, 3, 2, 1)) == 6


@pytest.mark.parametrize("n,p", [(1, 1), (2, 3), (4, 5), (5, 2)])
def test_wick_closed_forms(n, p):
    assert expected_trace_exact(PathSumSpec.from_distribution(GAUSS, n, p, 2)) == n * p * (n + p + 1)
    m3 = n * p * (n * n + p * p + 3 * n * p + 3 * n + 3 * p + 4)
    assert expected_trace_exact(PathSumSpec.from_distribution(GAUSS, n, p, 3)) == m3


def test_rademacher_closed_form():
    for n, p in [(1, 1), (2, 3), (4, 5)]:
        assert expected_trace_exact(PathSumSpec.from_distribution(RADE, n, p, 2)) == n * p * (n + p - 1)


def test_path_sum_bruteforce():
    for dist in (GAUSS, RADE, EntryDistribution.symmetric_uniform()):
        for n, p, m in [(1, 3, 3), (2, 2, 3), (3, 2, 2), (2, 3, 4)]:
            spec = PathSumSpec.from_distribution(dist, n, p, m)
            assert expected_trace_exact(spec) == expected_trace_bruteforce(spec)


def test_path_sum_transpose_symmetry():
    for m in (1, 2, 3, 4):
        a = expected_trace_exact(PathSumSpec.from_distribution(RADE, 2, 5, m))
        b = expected_trace_exact(PathSumSpec.from_distribution(RADE, 5, 2, m))
        assert a == b


def test_path_sum_monte_carlo():
    spec = EnsembleSpec(RADE, 2, 2)
    vals = np.empty(100_000)
    for i in range(len(vals)):
        x = sample_matrix(spec, 11_000 + i).entries
        a = x.T @ x
        vals[i] = np.trace(a @ a)
    se = vals.std(ddof=1) / math.sqrt(len(vals))
    assert abs(vals.mean() - 12) < 4 * se


def _wigner_bruteforce(n, two_m, moments):
    total = 0
    for walk in itertools.product(range(n), repeat=two_m):
        counts = {}
        for t in range(two_m):
            a, b = walk[t], walk[(t + 1) % two_m]
            e = (min(a, b), max(a, b))
            counts[e] = counts.get(e, 0) + 1
        total += math.prod(moments[c] for c in counts.values())
    return total


def test_wigner_trace_examples():
    gauss = PathSumSpec.from_distribution(GAUSS, 1, 1, 4).moments
    rade = PathSumSpec.from_distribution(RADE, 1, 1, 4).moments
    assert expected_wigner_trace_exact(3, 2, gauss) == 9
    assert expected_wigner_trace_exact(1, 4, gauss) == 3
    assert expected_wigner_trace_exact(1, 8, gauss) == 105
    for moments in (gauss, rade):
        for n, two_m in [(2, 4), (3, 4), (3, 6), (2, 8)]:
            assert expected_wigner_trace_exact(n, two_m, moments) == _wigner_bruteforce(n, two_m, moments)


def test_domination():
    for dist in (GAUSS, RADE):
        for n, p, m in [(1, 1, 1), (2, 3, 2), (3, 1, 3), (1, 4, 2), (4, 4, 2)]:
            res = wigner_domination_check(PathSumSpec.from_distribution(dist, n, p, m))
            assert res.passed and res.lhs <= res.rhs


def test_path_spec_validation():
    with pytest.raises(ValueError, match="too large"):
        PathSumSpec.from_distribution(GAUSS, 5, 5, 2)
    with pytest.raises(ValueError, match="too large"):
        PathSumSpec.from_distribution(GAUSS, 2, 2, 6)
    with pytest.raises(ValueError, match="positive"):
        PathSumSpec.from_distribution(GAUSS, 0, 2, 2)
    with pytest.raises(ValueError, match="missing"):
        PathSumSpec(2, 2, 2, {1: 0, 2: 1, 3: 0})
    with pytest.raises(ValueError, match="odd"):
        PathSumSpec(2, 2, 1, {1: 0.5, 2: 1})
    with pytest.raises(ValueError, match="second"):
        PathSumSpec(2, 2, 1, {1: 0, 2: 2})
