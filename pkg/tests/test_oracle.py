import math

import numpy as np
import pytest

from bargmann.fock import GaussWeight, basis_vector
from bargmann.oracle import (
    NonFiniteSampleError, QuadratureRule, cauchy_taylor, gauss_inner, gauss_norm_over_annulus,
    laguerre_nodes,
)


@pytest.mark.parametrize("n", [1, 2, 5, 20, 40, 80])
def test_laguerre_matches_numpy(n):
    x, w = laguerre_nodes(n)
    X, W = np.polynomial.laguerre.laggauss(n)
    assert np.allclose(x, X, rtol=1e-13)
    assert np.allclose(w, W, rtol=1e-9, atol=1e-300)
    assert abs(w.sum() - 1) < 1e-12


def test_laguerre_exactness():
    x, w = laguerre_nodes(10)
    for k in range(20):
        assert np.sum(w * x**k) == pytest.approx(math.factorial(k), rel=1e-12)


def test_gauss_inner_examples():
    rule = QuadratureRule(GaussWeight(1.0), 10, 16)
    one = lambda z: np.ones_like(z)
    assert gauss_inner(one, one, rule) == pytest.approx(1.0, rel=1e-14)
    assert gauss_inner(lambda z: z**2, lambda z: z**2, rule) == pytest.approx(2.0, rel=1e-13)
    assert abs(gauss_inner(lambda z: z**3, lambda z: z**2, rule)) < 1e-14


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_orthonormality(r):
    rule = QuadratureRule(GaussWeight(r), 40, 128)
    vs = [basis_vector(n, 30, r) for n in range(31)]
    G = np.array([[gauss_inner(a, b, rule) for b in vs] for a in vs])
    assert np.abs(G - np.eye(31)).max() <= 1e-10


def test_node_doubling_stable():
    f = lambda z: (1 + 2j * z - z**3) * z**4
    a = gauss_inner(f, f, QuadratureRule(GaussWeight(1.0), 20, 64))
    b = gauss_inner(f, f, QuadratureRule(GaussWeight(1.0), 40, 128))
    assert abs(a - b) < 1e-12 * abs(b)


def test_nonfinite_sample_named():
    rule = QuadratureRule(GaussWeight(1.0), 4, 8)
    with pytest.raises(NonFiniteSampleError, match="node"):
        gauss_inner(lambda z: np.where(np.abs(z) > 1, np.nan, z), lambda z: z, rule)


def test_annulus_full_disk():
    one = lambda z: np.ones_like(z)
    assert gauss_norm_over_annulus(one, 1.0, 0.0, 9.0) == pytest.approx(1.0, abs=1e-12)
    # mass of the disk of radius R is 1 - exp(-r R^2)
    assert gauss_norm_over_annulus(one, 2.0, 0.0, 1.0) == pytest.approx(1 - math.exp(-2.0), rel=1e-12)


def test_annulus_power_and_log_modulus():
    z2 = lambda z: z**2
    a = gauss_norm_over_annulus(z2, 1.0, 0.5, 3.0)
    b = gauss_norm_over_annulus(lambda z: np.ones_like(z), 1.0, 0.5, 3.0, power=2)
    c = gauss_norm_over_annulus(lambda z: 2 * np.log(np.abs(z)), 1.0, 0.5, 3.0, log_modulus=True)
    assert a == pytest.approx(b, rel=1e-12)
    assert a == pytest.approx(c, rel=1e-12)


def test_annulus_gaussian_symbol_grows():
    f = lambda z: 0.5 * np.real(z**2)  # log|exp(z^2/2)| at r = 1
    vals = [gauss_norm_over_annulus(f, 1.0, 1.0, R, log_modulus=True) for R in (2, 4, 8)]
    assert vals[0] < vals[1] < vals[2]
    assert vals[2] > 1.5 * vals[1]


def test_annulus_rejects_bad_radii():
    with pytest.raises(ValueError):
        gauss_norm_over_annulus(lambda z: z, 1.0, 2.0, 1.0)


def test_cauchy_taylor():
    a = cauchy_taylor(np.exp, 10, 1.0, 64)
    assert a[3] == pytest.approx(1 / 6, abs=1e-12)
    p = lambda z: 1 - 2 * z + 0.5j * z**4
    b = cauchy_taylor(p, 6, 1.3, 16)
    assert np.allclose(b, [1, -2, 0, 0, 0.5j, 0, 0], atol=1e-14)
    with pytest.raises(ValueError):
        cauchy_taylor(np.exp, 10, 1.0, 20)


def test_cauchy_taylor_resummation():
    f = lambda z: np.exp(z) * np.cos(2 * z)
    rho, K, n = 1.0, 128, 60
    a = cauchy_taylor(f, n, rho, K)
    zs = 0.5 * rho * np.exp(2j * np.pi * np.arange(7) / 7)
    resum = np.polynomial.polynomial.polyval(zs, a)
    assert np.allclose(resum, f(zs), rtol=1e-12)
