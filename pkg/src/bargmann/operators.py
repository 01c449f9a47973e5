"""Compressions P_N T P_N of ladder and multiplication operators.

Every :class:`TruncatedOperator` carries how far its untruncated counterpart
can raise (``raise_by``) and lower (``lower_by``) polynomial degree.  Columns
``0..N - raise_by`` are truncation-free: the full image of ``u_m`` stays
inside degree N, so products and commutators are exact on them.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .fock import FockVector, GaussWeight, WeightMismatchError, as_weight
from .symbols import EntireSymbol, derivative, logsumexp_c

INF = math.inf


@dataclass(frozen=True)
class TruncatedOperator:
    weight: GaussWeight
    matrix: np.ndarray = field(repr=False)
    raise_by: float = 0
    lower_by: float = 0
    provenance: str = ""
    col_tail: np.ndarray | None = field(default=None, repr=False)
    row_tail: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        A = np.array(self.matrix, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("operator matrix must be square")
        if not np.all(np.isfinite(A)):
            raise ValueError(f"non-finite entries in {self.provenance or 'operator'}")
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "weight", as_weight(self.weight))

    @property
    def N(self) -> int:
        return self.matrix.shape[0] - 1

    @property
    def r(self) -> float:
        return self.weight.r

    @property
    def exact_cols(self) -> int:
        """Largest m such that columns 0..m are truncation-free (-1: none)."""
        if math.isinf(self.raise_by):
            return -1
        return max(self.N - int(self.raise_by), -1)

    @property
    def exact_rows(self) -> int:
        if math.isinf(self.lower_by):
            return -1
        return max(self.N - int(self.lower_by), -1)

    @cached_property
    def norm2(self) -> float:
        return float(np.linalg.norm(self.matrix, 2)) if self.matrix.size else 0.0

    def _check(self, other: TruncatedOperator):
        if self.weight != other.weight:
            raise WeightMismatchError(f"operators on r={self.r} and r={other.r}")
        if self.N != other.N:
            raise ValueError(f"size mismatch: N={self.N} vs N={other.N}")

    def __matmul__(self, other: TruncatedOperator) -> TruncatedOperator:
        self._check(other)
        return TruncatedOperator(
            self.weight, self.matrix @ other.matrix,
            self.raise_by + other.raise_by, self.lower_by + other.lower_by,
            f"{self.provenance}*{other.provenance}",
        )

    def __add__(self, other: TruncatedOperator) -> TruncatedOperator:
        self._check(other)
        return TruncatedOperator(
            self.weight, self.matrix + other.matrix,
            max(self.raise_by, other.raise_by), max(self.lower_by, other.lower_by),
            f"{self.provenance}+{other.provenance}",
        )

    def __sub__(self, other: TruncatedOperator) -> TruncatedOperator:
        return self + (-1.0) * other

    def __mul__(self, c: complex) -> TruncatedOperator:
        c = complex(c)
        if c == 0:
            return replace(self, matrix=np.zeros_like(self.matrix), raise_by=0, lower_by=0,
                           provenance="0", col_tail=None, row_tail=None)
        tail_scale = abs(c) ** 2
        return replace(
            self, matrix=c * self.matrix, provenance=f"({c:g})*{self.provenance}",
            col_tail=None if self.col_tail is None else tail_scale * self.col_tail,
            row_tail=None if self.row_tail is None else tail_scale * self.row_tail,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self


def identity_operator(N: int, r: GaussWeight | float = 1.0) -> TruncatedOperator:
    return TruncatedOperator(as_weight(r), np.eye(N + 1, dtype=complex), 0, 0, "I")


def zero_operator(N: int, r: GaussWeight | float = 1.0) -> TruncatedOperator:
    return TruncatedOperator(as_weight(r), np.zeros((N + 1, N + 1), dtype=complex), 0, 0, "0")


def creation_matrix(N: int, r: GaussWeight | float = 1.0) -> TruncatedOperator:
    """a+ = M_z: entries (n+1, n) = sqrt((n+1)/r)."""
    if N < 1:
        raise ValueError("N must be at least 1")
    weight = as_weight(r)
    A = np.zeros((N + 1, N + 1), dtype=complex)
    n = np.arange(N)
    A[n + 1, n] = np.sqrt((n + 1) / weight.r)
    return TruncatedOperator(weight, A, 1, 0, "creation")


def annihilation_matrix(N: int, r: GaussWeight | float = 1.0) -> TruncatedOperator:
    """a- = (1/r) d/dz: entries (n-1, n) = sqrt(n/r)."""
    return replace(adjoint(creation_matrix(N, r)), provenance="annihilation")


def adjoint(T: TruncatedOperator) -> TruncatedOperator:
    """Conjugate transpose; compression commutes with taking adjoints."""
    prov = T.provenance
    if prov.startswith("adj(") and prov.endswith(")"):
        prov = prov[4:-1]
    else:
        prov = f"adj({prov})"
    return TruncatedOperator(
        T.weight, T.matrix.conj().T, T.lower_by, T.raise_by, prov,
        col_tail=T.row_tail, row_tail=T.col_tail,
    )


def mult_matrix(phi: EntireSymbol, N: int, r: GaussWeight | float = 1.0,
                tail_terms: int | None = None) -> TruncatedOperator:
    """Compression of M_phi.

    Entry (n, m) = a_{n-m} sqrt(n! / (m! r^(n-m))) for n >= m.  ``col_tail[m]``
    is the squared norm sum_{n>N} |entry(n, m)|^2 lost to truncation.
    """
    weight = as_weight(r)
    rr = weight.r
    extra = tail_terms if tail_terms is not None else max(64, N)
    L = phi.log_coeffs(N + extra)
    j = np.arange(1, N + extra + 1, dtype=float)
    logj = np.log(j / rr)
    sqj = np.sqrt(j / rr)
    with np.errstate(under="ignore", over="ignore"):
        lin_coeffs = np.exp(L)
    A = np.zeros((N + 1, N + 1), dtype=complex)
    tails = np.zeros(N + 1)
    for m in range(N + 1):
        n = np.arange(m, N + extra + 1)
        k = n - m
        # log(n!/(m! r^k)) summed from j = m+1 upward: error grows with k only
        log_ratio = np.concatenate(([0.0], np.cumsum(logj[m:])))
        logs = L[k] + 0.5 * log_ratio
        with np.errstate(under="ignore", over="ignore", invalid="ignore"):
            vals = np.exp(logs)
            # direct products are a few ulps more accurate where nothing over/underflows
            ratio = np.concatenate(([1.0], np.cumprod(sqj[m:])))
            direct = lin_coeffs[k] * ratio
        safe = (np.abs(log_ratio) < 1000.0) & (np.abs(L[k].real) < 700.0) & np.isfinite(direct)
        vals[safe] = direct[safe]
        vals[np.isneginf(L[k].real)] = 0.0
        A[m:, m] = vals[: N + 1 - m]
        tail_logs = 2.0 * logs.real[N + 1 - m:]
        lt = logsumexp_c(tail_logs.astype(complex)) if tail_logs.size else complex(-np.inf)
        tails[m] = 0.0 if np.isneginf(lt.real) else math.exp(min(lt.real, 700.0))
    d = phi.poly_degree
    raise_by = INF if d is None else d
    return TruncatedOperator(weight, A, raise_by, 0, f"M[{phi.spec()}]", col_tail=tails,
                             row_tail=np.zeros(N + 1))


def q_matrix(N: int, r: GaussWeight | float = 1.0) -> TruncatedOperator:
    """Q = M_z + (1/r) d/dz."""
    Q = creation_matrix(N, r) + annihilation_matrix(N, r)
    return replace(Q, provenance="Q")


def p_matrix(N: int, r: GaussWeight | float = 1.0) -> TruncatedOperator:
    """P = i (M_z - (1/r) d/dz)."""
    P = 1j * (creation_matrix(N, r) - annihilation_matrix(N, r))
    return replace(P, provenance="P")


def commutator(T: TruncatedOperator, S: TruncatedOperator) -> TruncatedOperator:
    """TS - ST, exact on columns 0..N - raise_by(T) - raise_by(S)."""
    T._check(S)
    return TruncatedOperator(
        T.weight, T.matrix @ S.matrix - S.matrix @ T.matrix,
        T.raise_by + S.raise_by, T.lower_by + S.lower_by,
        f"[{T.provenance},{S.provenance}]",
    )


def harmonic_operator(Phi: EntireSymbol, Psi: EntireSymbol, N: int,
                      r: GaussWeight | float = 1.0) -> TruncatedOperator:
    """M_Phi + M_Psi^*."""
    H = mult_matrix(Phi, N, r) + adjoint(mult_matrix(Psi, N, r))
    return replace(H, provenance=f"M[{Phi.spec()}]+M[{Psi.spec()}]*")


def apply(T: TruncatedOperator, f: FockVector) -> FockVector:
    if T.weight != f.weight:
        raise WeightMismatchError(f"operator on r={T.r}, vector on r={f.r}")
    if f.degree > T.N:
        raise ValueError(f"vector degree {f.degree} exceeds operator size N={T.N}")
    return FockVector(T.weight, T.matrix @ f.padded(T.N))


def derivative_matrix(phi: EntireSymbol, N: int, r: GaussWeight | float = 1.0) -> TruncatedOperator:
    """Compression of M_{phi'}."""
    return mult_matrix(derivative(phi), N, r)


# --------------------------------------------------------------------------
# export
# --------------------------------------------------------------------------


def to_csv(T: TruncatedOperator) -> str:
    """Nonzero entries as ``row,col,re,im`` lines (17 significant digits)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "col", "re", "im"])
    rows, cols = np.nonzero(T.matrix)
    for i, j in zip(rows, cols):
        v = T.matrix[i, j]
        w.writerow([int(i), int(j), format(float(v.real), ".17g"), format(float(v.imag), ".17g")])
    return buf.getvalue()


def to_json_dict(T: TruncatedOperator) -> dict:
    """Dense row-major matrix of [re, im] pairs with metadata."""
    return {
        "N": T.N,
        "r": T.r,
        "provenance": T.provenance,
        "exact_cols": T.exact_cols,
        "matrix": [[[float(v.real), float(v.imag)] for v in row] for row in T.matrix],
    }
