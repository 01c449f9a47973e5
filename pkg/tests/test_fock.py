import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bargmann.fock import (
    FockVector, GaussWeight, WeightMismatchError, basis_norm_sq, basis_vector, embed_symbol,
    eval_vector, inner, kernel_gram, kernel_tail_sq, kernel_vector, zero_vector,
)
from bargmann.oracle import QuadratureRule, gauss_inner
from bargmann.symbols import ExpQuadratic, Polynomial, fock_norm_partial


def test_weight_validation():
    with pytest.raises(ValueError):
        GaussWeight(0.0)
    with pytest.raises(ValueError):
        GaussWeight(-1.0)
    with pytest.raises(ValueError):
        GaussWeight(float("inf"))


def test_vector_rejects_nonfinite():
    with pytest.raises(ValueError):
        FockVector(GaussWeight(1.0), [1.0, np.nan])


def test_basis_norm_sq_values():
    assert basis_norm_sq(0, 1.0) == 1.0
    assert basis_norm_sq(2, 1.0) == 2.0
    assert basis_norm_sq(3, 2.0) == pytest.approx(0.75, rel=1e-15)


def test_basis_norm_sq_against_oracle():
    rule = QuadratureRule(GaussWeight(1.0), radial_nodes=3, angles=8)
    z2 = lambda z: z**2
    assert gauss_inner(z2, z2, rule).real == pytest.approx(2.0, rel=1e-13)
    rule = QuadratureRule(GaussWeight(2.0), radial_nodes=4, angles=8)
    z3 = lambda z: z**3
    assert gauss_inner(z3, z3, rule).real == pytest.approx(0.75, rel=1e-13)


@pytest.mark.parametrize("r", [0.5, 1.0, 3.0])
def test_basis_norm_sq_relative_accuracy(r):
    for n in (0, 1, 10, 50, 100, 170):
        exact = Fraction(math.factorial(n)) / Fraction(r) ** n
        if exact > 1e300:
            continue
        assert abs(Fraction(basis_norm_sq(n, r)) / exact - 1) <= 1e-13
    # beyond the factorial range: log-gamma path, still finite where representable
    assert basis_norm_sq(200, 1e3) > 0


def test_kernel_vector_basics():
    e0 = kernel_vector(0, 5)
    assert np.array_equal(e0.coeffs, [1, 0, 0, 0, 0, 0])
    e1 = kernel_vector(1.0, 40)
    assert e1.norm() ** 2 == pytest.approx(math.e, rel=1e-14)


def test_kernel_cross_inner():
    # <e_v, e_w> = e_v(w) = exp(r w conj(v)); with v = 1-i, w = 1+i
    v, w = 1 - 1j, 1 + 1j
    got = inner(kernel_vector(v, 40), kernel_vector(w, 40))
    series = sum((w * np.conj(v)) ** n / math.factorial(n) for n in range(60))
    assert abs(got - series) < 1e-12 * abs(series)


def test_kernel_norm_monotone_with_tail():
    w, r = 0.8 + 0.6j, 1.5
    full = math.exp(r * abs(w) ** 2)
    prev = 0.0
    for N in range(0, 40):
        s = kernel_vector(w, N, r).norm() ** 2
        assert s >= prev
        prev = s
        assert s + kernel_tail_sq(w, N, r) == pytest.approx(full, rel=1e-13)


def test_inner_orthonormal_and_conjugate_linear():
    u3, u5 = basis_vector(3, 6), basis_vector(5, 6)
    assert inner(u3, u3) == 1
    assert inner(u3, u5) == 0
    f = FockVector(GaussWeight(1.0), [1, 2j, 3])
    g = FockVector(GaussWeight(1.0), [0.5, 1 - 1j])
    assert inner(f, 2j * g) == pytest.approx(-2j * inner(f, g))


def test_inner_weight_mismatch():
    with pytest.raises(WeightMismatchError):
        inner(basis_vector(0, 2, 1.0), basis_vector(0, 2, 2.0))


def test_reproducing_example():
    assert inner(embed_symbol(Polynomial((0, 0, 1)), 4), kernel_vector(2.0, 4)) == pytest.approx(4.0)


@settings(max_examples=30, deadline=None)
@given(
    coeffs=st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
                    min_size=1, max_size=11),
    rho=st.floats(0, 2), theta=st.floats(0, 2 * math.pi),
    r=st.sampled_from([0.5, 1.0, 2.0]),
)
def test_reproducing_property(coeffs, rho, theta, r):
    p = Polynomial(tuple(coeffs))
    f = embed_symbol(p, len(coeffs) - 1, r)
    w = rho * np.exp(1j * theta)
    direct = sum(c * w**n for n, c in enumerate(coeffs))
    got = inner(f, kernel_vector(w, len(coeffs) - 1, r))
    assert abs(got - direct) <= 1e-10 * (1 + f.norm())


def test_eval_examples():
    assert eval_vector(zero_vector(4), 1.3 + 2j) == 0
    assert eval_vector(basis_vector(1, 1, 4.0), 1.0) == pytest.approx(2.0)
    z = 0.3 - 0.7j
    assert eval_vector(kernel_vector(0.5 + 0.2j, 40, 1.0), z) == pytest.approx(
        np.exp(z * np.conj(0.5 + 0.2j)), rel=1e-14)


def test_eval_vectorised():
    f = embed_symbol(Polynomial((1, 2, 3)), 2)
    zs = np.array([0, 1, 2j])
    assert np.allclose(eval_vector(f, zs), 1 + 2 * zs + 3 * zs**2)


def test_embed_symbol_examples():
    assert np.array_equal(embed_symbol(Polynomial((1,)), 3).coeffs, [1, 0, 0, 0])
    assert np.allclose(embed_symbol(Polynomial((0, 1)), 1).coeffs, [0, 1])
    S = fock_norm_partial(ExpQuadratic(0.4), 1.0, 400)
    norms = [embed_symbol(ExpQuadratic(0.4), N).norm() ** 2 for N in (50, 100, 200)]
    assert norms[0] <= norms[1] <= norms[2]
    assert norms[2] == pytest.approx(S[-1], rel=1e-10)
    # closed form: ||exp(c z^2)||^2 = (1 - 4|c|^2/r^2)^(-1/2)
    assert S[-1] == pytest.approx((1 - 4 * 0.16) ** -0.5, rel=1e-10)


def test_kernel_gram():
    assert np.allclose(kernel_gram([0], 4), [[1]])
    G = kernel_gram([0, 1], 60)
    assert np.allclose(G, [[1, 1], [1, math.e]], atol=1e-14)
    rng = np.random.default_rng(0)
    ws = 0.9 * rng.random(5) * np.exp(2j * np.pi * rng.random(5))
    assert np.linalg.svd(kernel_gram(ws, 16), compute_uv=False).min() > 0
    with pytest.raises(ValueError):
        kernel_gram([0.5, 0.5], 4)
    with pytest.raises(ValueError):
        kernel_gram([0, 1, 2], 1)


def test_vector_arithmetic_pads():
    w = GaussWeight(1.0)
    a = FockVector(w, [1, 2])
    b = FockVector(w, [1, 1, 1])
    assert np.array_equal((a + b).coeffs, [2, 3, 1])
    assert np.array_equal((b - a).coeffs, [0, -1, 1])
