import math

import numpy as np
import pytest
from scipy.integrate import quad

from wishart_edge.ensembles import EnsembleSpec, EntryDistribution, sample_matrix
from wishart_edge.scaling import (
    mp_cdf, mp_density, mp_distance, rescale, scaling_constants, unrescale)
from wishart_edge.spectral import EmpiricalSpectralDistribution, empirical_spectral_distribution, gram_eigenvalues


def test_constants_examples():
    c = scaling_constants(100, 100)
    assert c.mu == pytest.approx(400)
    assert c.sigma == pytest.approx(20 * 0.2 ** (1 / 3)) and c.sigma == pytest.approx(11.696, abs=1e-3)
    c = scaling_constants(400, 100)
    assert c.mu == pytest.approx(900)
    assert c.sigma == pytest.approx(15.940, abs=1e-3)
    c = scaling_constants(1, 1)
    assert (c.mu, c.sigma) == (4.0, pytest.approx(2 * 2 ** (1 / 3)))


def test_symmetry_and_square_identities():
    for n, p in [(3, 7), (50, 20), (123, 456)]:
        a, b = scaling_constants(n, p), scaling_constants(p, n)
        assert a.mu == pytest.approx(b.mu, rel=1e-15) and a.sigma == pytest.approx(b.sigma, rel=1e-15)
    for p in (10, 200):
        c = scaling_constants(p, p)
        assert c.a == 0.0 and c.b == pytest.approx(4.0)
        assert c.mu == pytest.approx(4 * p) and c.sigma == pytest.approx(2 ** (4 / 3) * p ** (1 / 3))


def test_johnstone_flag():
    c = scaling_constants(200, 100, johnstone=True)
    ref = scaling_constants(199, 100)
    assert (c.mu, c.sigma) == (ref.mu, ref.sigma)
    assert c.gamma == 2.0


def test_rescale():
    c = scaling_constants(30, 20)
    assert rescale(c.mu, c) == 0.0
    assert rescale(c.mu + c.sigma, c) == pytest.approx(1.0)
    s = np.linspace(-5, 5, 11)
    assert np.allclose(rescale(unrescale(s, c), c), s, atol=1e-12)


def test_density_examples():
    assert mp_density(2.0, 1.0) == pytest.approx(1 / (2 * math.pi))
    assert mp_density(0.2, 4.0) == 0.0 and mp_density(2.3, 4.0) == 0.0
    for g in (1.0, 2.0, 4.0):
        a, b = scaling_constants(int(100 * g), 100).a, scaling_constants(int(100 * g), 100).b
        total = quad(lambda x: mp_density(x, g), a, b, epsabs=1e-12, limit=200)[0]
        assert total == pytest.approx(1.0, abs=1e-8)
        assert mp_density(a, g) == 0.0 or g == 1.0
        assert mp_density(b, g) == pytest.approx(0.0, abs=1e-12)
    xs = np.linspace(-1, 5, 101)
    assert np.all(mp_density(xs, 2.0) >= 0)


def test_cdf_with_atom():
    cdf = mp_cdf(0.5)
    assert cdf(1e-9) == pytest.approx(0.5)
    assert cdf(10.0) == pytest.approx(1.0, abs=1e-12)


def test_self_distance():
    cdf = mp_cdf(2.0)
    probs = (np.arange(10 ** 4) + 0.5) / 10 ** 4
    pts = np.array([cdf.quantile(q) for q in probs])
    assert mp_distance(EmpiricalSpectralDistribution(pts), 2.0) < 1e-3


def test_degenerate_esd():
    assert mp_distance(EmpiricalSpectralDistribution(np.zeros(10)), 1.0) == pytest.approx(1.0)


def test_gaussian_bulk():
    spec = EnsembleSpec(EntryDistribution.gaussian_real(), 800, 400)
    esd = empirical_spectral_distribution(gram_eigenvalues(sample_matrix(spec, 7)), 800)
    assert mp_distance(esd, 2.0) < 0.07
