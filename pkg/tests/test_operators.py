import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bargmann.fock import GaussWeight, basis_vector, embed_symbol, eval_vector, kernel_vector
from bargmann.operators import (
    adjoint, annihilation_matrix, apply, commutator, creation_matrix, harmonic_operator,
    identity_operator, mult_matrix, p_matrix, q_matrix, to_csv, to_json_dict,
)
from bargmann.oracle import QuadratureRule, gauss_inner
from bargmann.symbols import ExpQuadratic, Polynomial, Product, eval_symbol

small_complex = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)


def test_creation_entries():
    A = creation_matrix(2, 1.0).matrix
    assert np.allclose(np.diag(A, -1), [1, math.sqrt(2)])
    A = creation_matrix(2, 4.0).matrix
    assert np.allclose(np.diag(A, -1), [0.5, math.sqrt(2) / 2])
    assert creation_matrix(5, 1.0).exact_cols == 4


def test_creation_against_oracle():
    for r in (1.0, 4.0):
        rule = QuadratureRule(GaussWeight(r), 8, 16)
        for n in range(2):
            un = basis_vector(n, 3, r)
            un1 = basis_vector(n + 1, 3, r)
            got = gauss_inner(lambda z: z * eval_vector(un, z), un1, rule)
            assert got == pytest.approx(creation_matrix(2, r).matrix[n + 1, n], abs=1e-13)


def test_ladder_adjoint_and_commutator():
    N, r = 64, 1.5
    ap, am = creation_matrix(N, r), annihilation_matrix(N, r)
    assert np.array_equal(adjoint(ap).matrix, am.matrix)
    C = commutator(am, ap).matrix
    assert np.allclose(C[:N, :N], np.eye(N) / r, atol=1e-12, rtol=0)


def test_annihilation_on_kernel():
    w, N = 0.6 - 0.3j, 40
    e = kernel_vector(w, N)
    out = apply(annihilation_matrix(N), e).coeffs
    assert np.allclose(out[:N], np.conj(w) * e.coeffs[:N], atol=1e-14)


def test_mult_matrix_examples():
    N = 6
    assert np.allclose(mult_matrix(Polynomial((0, 1)), N).matrix, creation_matrix(N).matrix)
    assert np.allclose(mult_matrix(Polynomial((1,)), N).matrix, np.eye(N + 1))
    M = mult_matrix(Polynomial((0, 0, 1)), 4, 1.0)
    assert M.matrix[4, 2] == pytest.approx(math.sqrt(12))
    assert M.exact_cols == 2
    assert mult_matrix(ExpQuadratic(0.1), 8).exact_cols == -1


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_mult_matrix_against_oracle(r):
    rng = np.random.default_rng(int(r * 10))
    coeffs = tuple(rng.normal(size=7) + 1j * rng.normal(size=7))
    phi = Polynomial(coeffs)
    N = 30
    M = mult_matrix(phi, N, r).matrix
    rule = QuadratureRule(GaussWeight(r), 40, 128)
    Z = rule.points()
    phiZ = eval_symbol(phi, Z)
    U = [eval_vector(basis_vector(n, N, r), Z) for n in range(N + 1)]
    for m in range(0, N + 1, 3):
        for n in range(m, min(N, m + 6) + 1):
            ref = np.sum(rule.v[:, None] * phiZ * U[m] * np.conj(U[n])) / rule.angles
            assert abs(M[n, m] - ref) <= 1e-9 * max(1.0, abs(ref))


def test_mult_matrix_tail():
    # exp(0.2 z^2) column 0: the discarded tail is the norm mass beyond degree N
    phi, N = ExpQuadratic(0.2), 20
    M = mult_matrix(phi, N)
    full = (1 - 4 * 0.04) ** -0.5
    kept = np.sum(np.abs(M.matrix[:, 0]) ** 2)
    assert kept + M.col_tail[0] == pytest.approx(full, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(p=st.lists(small_complex, min_size=1, max_size=4), q=st.lists(small_complex, min_size=1, max_size=4))
def test_multiplicativity_on_exact_window(p, q):
    N = 24
    P, Q = Polynomial(tuple(p)), Polynomial(tuple(q))
    prod = mult_matrix(Product((P, Q)), N)
    comp = mult_matrix(P, N) @ mult_matrix(Q, N)
    w = comp.exact_cols
    assert w == N - (len(p) - 1) - (len(q) - 1)
    scale = 1 + np.abs(prod.matrix).max()
    assert np.allclose(prod.matrix[:, : w + 1], comp.matrix[:, : w + 1], atol=1e-12 * scale)


def test_adjoint_properties():
    M = mult_matrix(Polynomial((1, 2j, -1)), 8)
    A = adjoint(M)
    assert np.array_equal(adjoint(A).matrix, M.matrix)
    assert adjoint(A).provenance == M.provenance
    assert A.exact_rows == M.exact_cols
    iz = mult_matrix(Polynomial((0, 1j)), 6)
    assert np.allclose(adjoint(iz).matrix, -1j * annihilation_matrix(6).matrix)


def test_adjoint_matches_conjugated_oracle():
    r, N = 1.0, 10
    phi = Polynomial((0.5, -1j, 0.25))
    A = adjoint(mult_matrix(phi, N, r)).matrix
    rule = QuadratureRule(GaussWeight(r), 20, 32)
    for n in range(0, N - 2):
        for m in range(N + 1):
            un, um = basis_vector(n, N, r), basis_vector(m, N, r)
            ref = gauss_inner(un, lambda z: eval_symbol(phi, z) * eval_vector(um, z), rule)
            assert A[m, n] == pytest.approx(ref, abs=1e-12)


def test_q_p_structure():
    N, r = 12, 1.0
    Q, P = q_matrix(N, r).matrix, p_matrix(N, r).matrix
    assert np.allclose(Q, Q.T) and np.all(np.diag(Q) == 0)
    assert np.allclose(P, P.conj().T)
    n = np.arange(N)
    assert np.allclose(np.diag(Q, -1), np.sqrt((n + 1) / r))
    C = commutator(q_matrix(N, r), p_matrix(N, r)).matrix
    assert np.allclose(C[: N - 1, : N - 1], 2j / r * np.eye(N - 1), atol=1e-12)


def test_commutator_examples():
    N = 20
    M = mult_matrix(Polynomial((0, 0, 1)), N)
    C = commutator(M, creation_matrix(N))
    assert C.exact_cols == N - 3
    assert np.abs(C.matrix[:, : C.exact_cols + 1]).max() < 1e-12
    assert np.all(commutator(M, M).matrix == 0)
    with pytest.raises(ValueError):
        commutator(M, creation_matrix(N + 1))


def test_harmonic_examples():
    N = 10
    H = harmonic_operator(Polynomial((0, 1)), Polynomial((0, 1)), N)
    assert np.allclose(H.matrix, q_matrix(N).matrix)
    Z = harmonic_operator(Polynomial((0,)), Polynomial((0,)), N)
    assert np.all(Z.matrix == 0)


def test_apply_examples():
    N = 12
    f = embed_symbol(Polynomial((1, 2, 3)), N)
    assert np.array_equal(apply(identity_operator(N), f).coeffs, f.coeffs)
    phi, psi = Polynomial((0, 1j, 1)), Polynomial((2, 0, 1, 1))
    got = apply(mult_matrix(phi, N), embed_symbol(psi, N)).coeffs
    ref = embed_symbol(Product((phi, psi)), N).coeffs
    assert np.allclose(got[: N - 1], ref[: N - 1], atol=1e-12)
    w = 0.4 + 0.2j
    e = kernel_vector(w, 40)
    out = apply(adjoint(mult_matrix(phi, 40)), e).coeffs
    assert np.allclose(out, np.conj(eval_symbol(phi, w)) * e.coeffs, atol=1e-12)


def test_export_formats():
    T = creation_matrix(4, 1.0)
    lines = to_csv(T).strip().split("\n")
    assert lines[0] == "row,col,re,im"
    assert len(lines) == 5
    d = to_json_dict(T)
    assert d["N"] == 4 and d["exact_cols"] == 3 and d["provenance"] == "creation"
    json.dumps(d)
    assert d["matrix"][2][1] == [math.sqrt(2), 0.0]
