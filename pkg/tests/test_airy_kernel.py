import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import airy as scipy_airy

from wishart_edge.airy import airy
from wishart_edge.airy_kernel import (
    FredholmConvergenceError, RealEdgeKernel, airy_kernel, count_distribution, discretize,
    fredholm_gap, kernel_sup_difference, laguerre_functions, laguerre_kernel, real_edge_density,
    real_edge_kernel, real_k11, real_k12, real_k21, real_k22, rescaled_kernel_convergence,
    topk_cdf_complex)
from wishart_edge.harness import rescaled_column

# sqrt(det K(s, s)) of the limiting real kernel, checked against the
# empirical real-Gaussian edge histogram below
REAL_DENSITY = {-6.0: 0.7806, -2.0: 0.4589, 0.0: 0.1853, 2.0: 0.01748}


def sai(x):
    return scipy_airy(x)[0]


def test_airy_kernel_examples():
    assert airy_kernel(0.0, 0.0) == pytest.approx(airy(0.0).ai_prime ** 2, rel=1e-14)
    ref = quad(lambda t: sai(t) * sai(1 + t), 0, 40, epsabs=1e-13)[0]
    assert airy_kernel(0.0, 1.0) == pytest.approx(ref, abs=1e-8)
    for s1, s2 in [(0.3, -1.7), (-4.0, 2.5), (1.0, 1.0 + 1e-7)]:
        assert airy_kernel(s1, s2) == airy_kernel(s2, s1)


def test_airy_kernel_near_diagonal_continuous():
    d = airy_kernel(-1.5, -1.5)
    for h in (1e-4, 1e-6, 1e-8):
        assert airy_kernel(-1.5, -1.5 + h) == pytest.approx(d, abs=2 * h + 1e-12)


def test_discretization_invariants():
    for s in (-8.0, -3.0, 0.0, 4.0):
        disc = discretize(s)
        assert np.all(disc.weights > 0)
        assert np.allclose(disc.matrix, disc.matrix.T, atol=1e-12)
        lam = disc.eigenvalues()
        assert lam.min() > -1e-10 and lam.max() < 1 + 1e-8
    with pytest.raises(ValueError):
        discretize(0.0, m_nodes=10)
    with pytest.raises(ValueError):
        discretize(-9.0)


def test_gap_examples(table):
    assert fredholm_gap(8.0) == pytest.approx(1.0, abs=1e-10)
    assert fredholm_gap(0.0) == pytest.approx(table.cdf(0.0, 2), abs=1e-6)
    assert fredholm_gap(-2.0) < fredholm_gap(0.0) < fredholm_gap(2.0)


def test_node_doubling():
    for s in (-5.0, -2.0, 0.0, 3.0):
        assert abs(fredholm_gap(s, 60, check=False) - fredholm_gap(s, 120, check=False)) < 1e-8


def test_convergence_error():
    with pytest.raises(FredholmConvergenceError, match="node doubling"):
        fredholm_gap(-3.0, m_nodes=20, length=60.0)


def test_count_distribution_examples():
    for s in (-3.0, 0.0, 1.0):
        assert count_distribution(s, 4)[0] == pytest.approx(fredholm_gap(s), abs=1e-8)
    far = count_distribution(8.0, 4)
    assert far[0] == pytest.approx(1.0, abs=1e-10) and np.all(far[1:] < 1e-8)
    assert np.sum(count_distribution(-4.0, 10)) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        count_distribution(0.0, 2, method="contour")


def test_product_and_interpolation_agree_where_conditioned():
    a = count_distribution(0.0, 4, method="product")
    b = count_distribution(0.0, 4, method="interpolation")
    assert np.allclose(a, b, atol=1e-12)


def test_factorial_moment_identity():
    s = -1.0
    m = discretize(s).matrix
    h = 1e-5
    eye = np.eye(len(m))
    deriv = (np.linalg.det(eye + h * m) - np.linalg.det(eye - h * m)) / (2 * h)
    first_moment = quad(lambda t: airy_kernel(t, t), s, 30, epsabs=1e-12, limit=200)[0]
    assert deriv == pytest.approx(first_moment, abs=1e-6)
    probs = count_distribution(s, 12)
    assert np.dot(np.arange(13), probs) == pytest.approx(first_moment, abs=1e-6)


def test_topk():
    for s in (-3.0, -1.0, 0.5):
        assert topk_cdf_complex(1, s) == pytest.approx(fredholm_gap(s), abs=1e-14)
        assert topk_cdf_complex(3, s) >= topk_cdf_complex(2, s) >= topk_cdf_complex(1, s)
    with pytest.raises(ValueError):
        topk_cdf_complex(0, 0.0)


# Laguerre kernel ---------------------------------------------------------

def test_laguerre_p1():
    x, y, alpha = 1.3, 0.4, 3
    phi0 = lambda t: t ** (alpha / 2) * math.exp(-t / 2) / math.sqrt(math.factorial(alpha))
    assert laguerre_kernel(1, alpha, x, y) == pytest.approx(phi0(x) * phi0(y), rel=1e-14)


@pytest.mark.parametrize("alpha", [0, 1, 2, 4])
def test_laguerre_orthonormal(alpha):
    f = lambda t, i, j: float(np.prod(laguerre_functions(6, alpha, [t])[[i, j], 0]))
    for i in range(6):
        assert quad(f, 0, np.inf, args=(i, i), limit=200)[0] == pytest.approx(1.0, abs=1e-8)
        if i:
            assert abs(quad(f, 0, np.inf, args=(i, i - 1), limit=200)[0]) < 1e-8


def test_laguerre_reproducing():
    x, y = 1.1, 3.7
    val = quad(lambda t: laguerre_kernel(3, 2, x, t) * laguerre_kernel(3, 2, t, y), 0, np.inf, limit=200)[0]
    assert val == pytest.approx(laguerre_kernel(3, 2, x, y), abs=1e-6)


def test_laguerre_errors():
    with pytest.raises(ValueError):
        laguerre_functions(0, 0, [1.0])
    with pytest.raises(ValueError):
        laguerre_functions(3, 0, [0.0])


def test_rescaled_convergence():
    assert abs(rescaled_kernel_convergence(200, 0, 0.0, 0.0).difference) < 0.05
    r = rescaled_kernel_convergence(200, 0, 4.0, 4.0)
    assert r.finite_p_value < 1e-3 and r.airy_value < 1e-3
    sups = [kernel_sup_difference(p) for p in (50, 100, 200, 400)]
    assert all(b < a for a, b in zip(sups, sups[1:]))
    grid = (-2.0, 0.0, 2.0)
    mean_abs = lambda p: np.mean([abs(rescaled_kernel_convergence(p, 0, a, b).difference)
                                  for a in grid for b in grid])
    assert mean_abs(400) < mean_abs(100)
    assert kernel_sup_difference(400, alpha=5) < 0.05


# real 2x2 kernel ---------------------------------------------------------

def test_real_kernel_structure():
    for s1, s2 in [(0.0, 1.0), (-2.5, 0.7), (3.0, -1.0)]:
        k = real_edge_kernel(s1, s2)
        assert k[1, 1] == real_k11(s2, s1)
        assert real_k22(s1, s2) == real_k11(s2, s1)
        assert real_k21(s1, s2) == pytest.approx(-real_k21(s2, s1), abs=1e-12)
        assert real_k12(s1, s2) == pytest.approx(-real_k12(s2, s1), abs=1e-12)
    assert real_k11(6.0, 6.0) < 1e-4
    assert np.allclose(RealEdgeKernel()(0.5, -0.5), real_edge_kernel(0.5, -0.5))
    with pytest.raises(ValueError):
        real_edge_kernel(-9.0, 0.0)


def test_real_k12_finite_difference():
    h = 1e-5
    d2 = (airy_kernel(0.0, h) - airy_kernel(0.0, -h)) / (2 * h)
    assert real_k12(0.0, 0.0) == pytest.approx(-0.5 * airy(0.0).ai ** 2 - d2, abs=1e-5)
    d2 = (airy_kernel(-1.0, 0.5 + h) - airy_kernel(-1.0, 0.5 - h)) / (2 * h)
    assert real_k12(-1.0, 0.5) == pytest.approx(-0.5 * airy(-1.0).ai * airy(0.5).ai - d2, abs=1e-8)


def test_real_k21_large_separation():
    # for s1 >> s2 every Airy term is negligible and K21 -> -eps(s1 - s2) + T(s2)/2
    t2 = quad(sai, 2.0, 40)[0]
    assert real_k21(30.0, 2.0) == pytest.approx(-0.5 + 0.5 * t2, abs=1e-10)


def test_real_density_values():
    for s, v in REAL_DENSITY.items():
        assert real_edge_density(s) == pytest.approx(v, abs=1e-4)
    assert real_edge_density(6.0) < 1e-3
    assert all(real_edge_density(s) >= 0 for s in np.linspace(-6, 4, 21))
    with pytest.raises(ValueError):
        real_edge_density(-8.5)


@pytest.mark.slow
def test_real_density_histogram(edge_runs):
    """Rescaled top-10 eigenvalues of real Gaussian n=p=200 (N=4000) against rho_1."""
    recs = edge_runs.records["real"]
    pts = np.concatenate([rescaled_column(recs, k) for k in range(1, 11)])
    edges = np.arange(-5.0, 2.0 + 1e-9, 0.25)
    hits, _ = np.histogram(pts, edges)
    checked = 0
    for lo, hi, h in zip(edges[:-1], edges[1:], hits):
        if h < 100:
            continue
        expect = len(recs) * quad(real_edge_density, lo, hi, epsabs=1e-6)[0]
        assert abs(h - expect) <= 0.25 * expect, (lo, h, expect)
        checked += 1
    assert checked >= 15
