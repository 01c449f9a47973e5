"""Residual checks for commutation relative to finite test families.

Each check returns a :class:`CommutationReport`.  Residuals are normalised so
thresholds are scale-free, and every report carries an a priori bound on how
much truncation could contaminate it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .fock import FockVector, GaussWeight, as_weight, kernel_tail_sq, kernel_vector
from .operators import (
    TruncatedOperator, adjoint, annihilation_matrix, commutator, creation_matrix,
    harmonic_operator, mult_matrix, p_matrix, q_matrix,
)
from .symbols import (
    EntireSymbol, Kernel, LambdaVerdict, classify_growth, derivative, eval_symbol,
    logsumexp_c,
)

DEFAULT_K_GRID = (0j, 0.5 + 0j, -0.5 + 0j, 0.5j, -0.5j, 0.7 + 0.3j)
DEFAULT_V_GRID = (0j, 0.5 + 0j, -0.5j, 0.7 + 0j, 0.7 + 0.3j)


class EmptyWindowError(ValueError):
    """No column of the compression is free of truncation error; raise N."""


@dataclass(frozen=True)
class TestFamily:
    """Finite sample of K (kernels e_w) or PK (products z^j e_w, j <= J)."""

    __test__ = False  # not a pytest class

    kind: str
    points: tuple
    N: int
    weight: GaussWeight = GaussWeight(1.0)
    J: int = 3

    def __post_init__(self):
        if self.kind not in ("K", "PK"):
            raise ValueError(f"unknown family kind {self.kind!r}")
        if not self.points:
            raise ValueError("test family needs at least one point")
        object.__setattr__(self, "points", tuple(complex(w) for w in self.points))
        object.__setattr__(self, "weight", as_weight(self.weight))

    @property
    def r(self) -> float:
        return self.weight.r

    def labels(self) -> list[str]:
        if self.kind == "K":
            return [f"e[{w:g}]" for w in self.points]
        return [f"z^{j}e[{w:g}]" for w in self.points for j in range(self.J + 1)]

    def vectors(self) -> list[tuple[str, FockVector, float]]:
        """(label, truncated vector, relative norm of the discarded tail)."""
        out = []
        for w in self.points:
            if self.kind == "K":
                v = kernel_vector(w, self.N, self.weight)
                full = math.exp(self.r * abs(w) ** 2)
                out.append((f"e[{w:g}]", v, math.sqrt(kernel_tail_sq(w, self.N, self.weight) / full)))
            else:
                for j in range(self.J + 1):
                    v, tail = pk_vector(w, j, self.N, self.weight)
                    out.append((f"z^{j}e[{w:g}]", v, tail))
        return out


def pk_vector(w: complex, j: int, N: int, r: GaussWeight | float = 1.0,
              extra: int = 200) -> tuple[FockVector, float]:
    """Truncation of z^j e_w and the relative norm of what was cut off.

    z^j e_w = sum_m (r conj w)^m / m! z^(m+j); in the orthonormal basis the
    coefficient of u_n (n = m + j) is (r conj w)^m / m! * sqrt(n! / r^n).
    """
    weight = as_weight(r)
    rr = weight.r
    M = N + extra
    n = np.arange(j, M + 1)
    m = n - j
    logw = complex(np.log(complex(rr * np.conj(w)))) if w != 0 else complex(-np.inf)
    with np.errstate(invalid="ignore"):
        L = m * logw - gammaln(m + 1.0) + 0.5 * (gammaln(n + 1.0) - n * math.log(rr))
    if w == 0:
        L = np.where(m == 0, 0.5 * (gammaln(j + 1.0) - j * math.log(rr)), -np.inf + 0j)
    c = np.zeros(M + 1, dtype=complex)
    with np.errstate(under="ignore"):
        c[j:] = np.where(np.isneginf(L.real), 0.0, np.exp(L))
    total = logsumexp_c((2 * L.real).astype(complex)).real
    kept = c[: N + 1]
    cut = np.where(n > N, 2 * L.real, -np.inf)
    tail = logsumexp_c(cut.astype(complex)).real
    rel = 0.0 if np.isneginf(tail) else math.exp(0.5 * (tail - total))
    return FockVector(weight, kept), rel


@dataclass(frozen=True)
class CommutationReport:
    condition_id: str
    residuals: tuple
    max_residual: float
    truncation_tail: float
    tol: float
    r: float
    N: int
    grid: tuple
    details: dict = field(default_factory=dict, compare=False)

    @property
    def passed(self) -> bool:
        ok = self.max_residual <= self.tol + self.truncation_tail
        return bool(ok and self.details.get("monotone", True))

    def to_dict(self) -> dict:
        return {
            "condition_id": self.condition_id,
            "r": self.r,
            "N": self.N,
            "grid": list(self.grid),
            "residuals": [[label, value] for label, value in self.residuals],
            "max_residual": self.max_residual,
            "truncation_tail": self.truncation_tail,
            "tol": self.tol,
            "pass": self.passed,
            "details": self.details,
        }


def _report(cid, residuals, tail, tol, r, N, grid, details=None) -> CommutationReport:
    mx = max((v for _, v in residuals), default=0.0)
    return CommutationReport(cid, tuple(residuals), float(mx), float(tail), float(tol),
                             float(r), int(N), tuple(grid), details or {})


def check_commute_rel(A: TruncatedOperator, B: TruncatedOperator, E: TestFamily,
                      tol: float, condition_id: str = "def3") -> CommutationReport:
    """<A eta, B* xi> - <B eta, A* xi> over all pairs of the family.

    Normalised by ||eta|| ||xi|| (1 + ||A||_2)(1 + ||B||_2).
    """
    A._check(B)
    if A.weight != E.weight or A.N != E.N:
        raise ValueError("test family does not match operator size/weight")
    vecs = E.vectors()
    X = np.array([v.coeffs for _, v, _ in vecs]).T
    norms = np.linalg.norm(X, axis=0)
    AX = A.matrix @ X
    BX = B.matrix @ X
    BsX = B.matrix.conj().T @ X
    AsX = A.matrix.conj().T @ X
    # pair (eta_i, xi_k): <A eta_i, B* xi_k> = sum AX[:, i] conj(BsX[:, k])
    P1 = AX.T @ BsX.conj()
    P2 = BX.T @ AsX.conj()
    scale_ = (1 + A.norm2) * (1 + B.norm2)
    R = np.abs(P1 - P2) / (np.outer(norms, norms) * scale_)
    tails = np.array([t for _, _, t in vecs])
    residuals = [(f"({vecs[i][0]},{vecs[k][0]})", float(R[i, k]))
                 for i in range(len(vecs)) for k in range(len(vecs))]
    tail = float(np.max(tails[:, None] + tails[None, :]))
    return _report(condition_id, residuals, tail, tol, A.r, A.N, E.labels(),
                   {"A": A.provenance, "B": B.provenance, "family": E.kind})


def _as_operator(A_or_phi, N, r) -> TruncatedOperator:
    if isinstance(A_or_phi, TruncatedOperator):
        return A_or_phi
    return mult_matrix(A_or_phi, N, r)


def check_prop2(phi: EntireSymbol, w_grid: Sequence[complex], N: int,
                r: GaussWeight | float = 1.0, tol: float = 1e-8) -> CommutationReport:
    """|| P_N M_phi* e_w - conj(phi(w)) P_N e_w || / ||e_w|| at one truncation."""
    weight = as_weight(r)
    As = adjoint(mult_matrix(phi, N, weight))
    residuals, tails = [], []
    for w in w_grid:
        e = kernel_vector(w, N, weight)
        lam = np.conj(eval_symbol(phi, w))
        res = np.linalg.norm(As.matrix @ e.coeffs - lam * e.coeffs) / e.norm()
        residuals.append((f"{complex(w):g}", float(res)))
        tails.append(math.sqrt(kernel_tail_sq(w, N, weight) / math.exp(weight.r * abs(w) ** 2)))
    return _report("prop2", residuals, 0.0, tol, weight.r, N, [str(complex(w)) for w in w_grid],
                   {"kernel_tail": max(tails)})


def check_thm4_d(phi: EntireSymbol, w_grid: Sequence[complex], N_sequence: Sequence[int],
                 r: GaussWeight | float = 1.0, tol: float = 1e-8,
                 slack: float = 1e-14) -> CommutationReport:
    """Eigen-relation A* e_w = conj(phi(w)) e_w along increasing truncations.

    Passes when the residual at the largest N is below ``tol`` and the
    residual sequence for every w is nonincreasing (up to ``slack``).
    """
    weight = as_weight(r)
    report = classify_growth(phi, weight)
    if report.lambda_verdict is LambdaVerdict.OUT:
        raise ValueError(f"{phi.spec()} is not in the Newman-Shapiro class at r={weight.r}")
    Ns = sorted(int(n) for n in N_sequence)
    table = {}
    for N in Ns:
        sub = check_prop2(phi, w_grid, N, weight, tol)
        table[N] = [v for _, v in sub.residuals]
    monotone = True
    for i in range(len(w_grid)):
        seq = [table[N][i] for N in Ns]
        monotone &= all(b <= a + slack for a, b in zip(seq, seq[1:]))
    last = Ns[-1]
    residuals = [(f"{complex(w):g}", table[last][i]) for i, w in enumerate(w_grid)]
    details = {"N_sequence": Ns, "monotone": bool(monotone),
               "by_N": {str(N): table[N] for N in Ns}}
    return _report("thm4d", residuals, 0.0, tol, weight.r, last,
                   [str(complex(w)) for w in w_grid], details)


def check_thm4_a(A_or_phi, w_grid: Sequence[complex], v_grid: Sequence[complex], N: int,
                 r: GaussWeight | float = 1.0, tol: float = 1e-8) -> CommutationReport:
    """[A, M_{e_w}] = 0 relative to K, over w in ``w_grid`` and pairs from ``v_grid``.

    For a multiplication operator A = M_phi the pairing
    <M_{e_u} e_v, A* e_w> = phi(w) exp(r (conj u + conj v) w) is also compared
    in closed form and recorded in the details.
    """
    weight = as_weight(r)
    A = _as_operator(A_or_phi, N, weight)
    E = TestFamily("K", tuple(v_grid), N, weight)
    residuals, tails = [], []
    for w in w_grid:
        Mw = mult_matrix(Kernel(complex(w), weight), N, weight)
        sub = check_commute_rel(A, Mw, E, tol, "thm4a")
        residuals += [(f"w={complex(w):g}:{label}", v) for label, v in sub.residuals]
        tails.append(sub.truncation_tail)
    details = {"A": A.provenance}
    if isinstance(A_or_phi, EntireSymbol):
        worst = 0.0
        for u in v_grid:
            Mu = mult_matrix(Kernel(complex(u), weight), N, weight)
            for v in v_grid:
                ev = kernel_vector(v, N, weight).coeffs
                for w in w_grid:
                    ew = kernel_vector(w, N, weight).coeffs
                    lhs = np.vdot(A.matrix.conj().T @ ew, Mu.matrix @ ev)
                    rhs = eval_symbol(A_or_phi, w) * np.exp(
                        weight.r * (np.conj(u) + np.conj(v)) * w)
                    worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
        details["closed_form_deviation"] = float(worst)
    return _report("thm4a", residuals, max(tails), tol, weight.r, N,
                   [str(complex(w)) for w in w_grid], details)


def check_thm4_b(A_or_phi, w_grid: Sequence[complex], N: int, r: GaussWeight | float = 1.0,
                 tol: float = 1e-8, J: int = 3) -> CommutationReport:
    """[A, M_z] = 0 relative to PK."""
    weight = as_weight(r)
    A = _as_operator(A_or_phi, N, weight)
    E = TestFamily("PK", tuple(w_grid), N, weight, J)
    return check_commute_rel(A, creation_matrix(N, weight), E, tol, "thm4b")


def check_thm4_f(A_or_phi, w_grid: Sequence[complex], N: int, r: GaussWeight | float = 1.0,
                 tol: float = 1e-8) -> CommutationReport:
    """[d/dz, A*] = 0 relative to K, with d/dz realised as r times annihilation."""
    weight = as_weight(r)
    A = _as_operator(A_or_phi, N, weight)
    D = weight.r * annihilation_matrix(N, weight)
    E = TestFamily("K", tuple(w_grid), N, weight)
    return check_commute_rel(D, adjoint(A), E, tol, "thm4f")


def hermite_difference_quotient(n: int, h: float, N: int,
                                r: GaussWeight | float = 1.0) -> FockVector:
    """f_h = h^-n sum_{k=0}^{n} (-1)^(n-k) C(n,k) P_N e_{kh}.

    Coefficient m of f_h is sqrt(r^m/m!) h^(m-n) sum_k (-1)^(n-k) C(n,k) k^m;
    the alternating sum is formed in exact integer arithmetic, so no
    cancellation error is introduced.  As h -> 0 the vector tends to (rz)^n.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not h > 0:
        raise ValueError("h must be positive")
    weight = as_weight(r)
    if n == 0:
        return kernel_vector(0.0, N, weight)
    rr = weight.r
    c = np.zeros(N + 1, dtype=complex)
    for m in range(n, N + 1):
        diff = sum((-1) ** (n - k) * math.comb(n, k) * k ** m for k in range(n + 1))
        if diff == 0:
            continue
        logmag = (0.5 * (m * math.log(rr) - math.lgamma(m + 1)) + (m - n) * math.log(h)
                  + math.log(abs(diff)))
        c[m] = math.copysign(math.exp(logmag), diff) if logmag > -745 else 0.0
    return FockVector(weight, c)


def rayleigh_eigenvalue(A: TruncatedOperator, v: complex) -> complex:
    """<A e_v, e_v> / ||e_v||^2 with the kernel truncated at A's size."""
    e = kernel_vector(v, A.N, A.weight).coeffs
    return complex(np.vdot(e, A.matrix @ e) / np.vdot(e, e))


def _remark5_window(M: TruncatedOperator, raise_total: float, r: float, tol: float) -> int:
    if not math.isinf(raise_total):
        return M.N - int(raise_total)
    # non-polynomial symbol: keep the leading columns whose truncated mass,
    # pushed through rQ, is below tol
    bound = r * math.sqrt((M.N + 1) / r) * np.sqrt(M.col_tail)
    ok = bound <= tol
    if not ok[0]:
        return -1
    return int(np.argmin(ok)) - 1 if not ok.all() else M.N


def check_remark5(phi: EntireSymbol, N: int, r: GaussWeight | float = 1.0,
                  tol: float = 1e-12) -> tuple[CommutationReport, CommutationReport]:
    """[rQ, M_phi] = M_phi' and [-rP, M_phi] = M_{i phi'} on the exact columns.

    Residuals are maximal absolute entry differences.  The P report also
    records the combined identity [-rP, M_phi] = i [rQ, M_phi].
    """
    weight = as_weight(r)
    rr = weight.r
    M = mult_matrix(phi, N, weight)
    Mp = mult_matrix(derivative(phi), N, weight)
    CQ = commutator(rr * q_matrix(N, weight), M)
    CP = commutator(-rr * p_matrix(N, weight), M)
    window = _remark5_window(M, CQ.raise_by, rr, tol)
    if window < 0:
        raise EmptyWindowError(
            f"no truncation-free columns for {phi.spec()} at N={N}; increase N")
    cols = slice(0, window + 1)
    target = Mp.matrix[:, cols]
    scale_ = max(1.0, float(np.abs(target).max()))
    dq = float(np.abs(CQ.matrix[:, cols] - target).max())
    dp = float(np.abs(CP.matrix[:, cols] - 1j * target).max())
    dcr = float(np.abs(CP.matrix[:, cols] - 1j * CQ.matrix[:, cols]).max())
    tail = 0.0 if not math.isinf(M.raise_by) else rr * math.sqrt((N + 1) / rr) * float(
        np.sqrt(M.col_tail[cols]).max())
    common = {"window": window, "entry_scale": scale_}
    q = _report("remark5Q", [("[rQ,M]-M'", dq)], tail, tol, rr, N, [f"cols 0..{window}"],
                {**common, "relative_residual": dq / scale_})
    p = _report("remark5P", [("[-rP,M]-iM'", dp), ("[-rP,M]-i[rQ,M]", dcr)], tail, tol, rr, N,
                [f"cols 0..{window}"], {**common, "relative_residual": dp / scale_})
    return q, p


def check_harmonic(Phi: EntireSymbol, Psi: EntireSymbol, v_grid: Sequence[complex], N: int,
                   r: GaussWeight | float = 1.0, tol: float = 1e-8,
                   A: TruncatedOperator | None = None) -> CommutationReport:
    """M_z* A e_v - A M_z* e_v = (1/r) M_Phi' e_v for A = M_Phi + M_Psi*.

    Also records the second-level residual [M_z, [M_z*, A]] e_v.  The only
    compression artefact sits in row N, where M_z* reaches degree N+1 of
    M_Phi e_v; its size is reported as the truncation tail.
    """
    weight = as_weight(r)
    rr = weight.r
    if A is None:
        A = harmonic_operator(Phi, Psi, N, weight)
    am = annihilation_matrix(N, weight).matrix
    ap = creation_matrix(N, weight).matrix
    Mdp = mult_matrix(derivative(Phi), N, weight).matrix / rr
    d = Phi.poly_degree
    big = N + (d if d is not None else 64)
    Mbig = mult_matrix(Phi, big, weight).matrix
    residuals, second, tails = [], [], []
    for v in v_grid:
        e = kernel_vector(v, N, weight).coeffs
        ne = np.linalg.norm(e)
        inner = am @ (A.matrix @ e) - A.matrix @ (am @ e)
        residuals.append((f"{complex(v):g}", float(np.linalg.norm(inner - Mdp @ e) / ne)))
        lvl2 = ap @ inner - _bracket_after_z(A.matrix, am, ap, e)
        second.append(float(np.linalg.norm(lvl2) / ne))
        spill = np.zeros(big + 1, dtype=complex)
        spill[: N + 1] = e
        out = Mbig @ spill
        tails.append(math.sqrt((N + 1) / rr) * abs(out[N + 1]) / ne if big > N else 0.0)
    details = {"second_level_max": max(second), "second_level": second}
    return _report("remark6", residuals, max(tails), tol, rr, N,
                   [str(complex(v)) for v in v_grid], details)


def _bracket_after_z(A: np.ndarray, am: np.ndarray, ap: np.ndarray, e: np.ndarray) -> np.ndarray:
    """[M_z*, A] (M_z e)."""
    x = ap @ e
    return am @ (A @ x) - A @ (am @ x)
