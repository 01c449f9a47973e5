"""Truncated Bargmann-Fock space.

States are finite coefficient vectors in the orthonormal monomial basis

    u_n(z) = (r**n / n!)**(1/2) * z**n,

so that ``||z**n||**2 = n! / r**n`` and the reproducing kernel
``e_w(z) = exp(r z conj(w))`` satisfies ``<f, e_w> = f(w)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np
from scipy.special import gammaln

if TYPE_CHECKING:
    from .symbols import EntireSymbol


class WeightMismatchError(ValueError):
    """Operands live in Fock spaces with different Gaussian weights."""


@dataclass(frozen=True)
class GaussWeight:
    """Scale r of the Gaussian measure (r/pi) exp(-r|z|^2) dA."""

    r: float = 1.0

    def __post_init__(self):
        r = float(self.r)
        if not (r > 0 and math.isfinite(r)):
            raise ValueError(f"Gaussian weight must be a positive finite real, got {self.r!r}")
        object.__setattr__(self, "r", r)


def as_weight(r: GaussWeight | float) -> GaussWeight:
    return r if isinstance(r, GaussWeight) else GaussWeight(r)


@dataclass(frozen=True)
class FockVector:
    """Coefficients c_0..c_N of a state in the orthonormal basis u_n."""

    weight: GaussWeight
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.size == 0:
            raise ValueError("a FockVector needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise ValueError("FockVector coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "weight", as_weight(self.weight))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def r(self) -> float:
        return self.weight.r

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def padded(self, N: int) -> np.ndarray:
        """Coefficients zero-padded (or truncated) to degree N."""
        out = np.zeros(N + 1, dtype=complex)
        k = min(N + 1, self.coeffs.size)
        out[:k] = self.coeffs[:k]
        return out

    def __call__(self, z):
        return eval_vector(self, z)

    def __add__(self, other: FockVector) -> FockVector:
        _check_weights(self, other)
        N = max(self.degree, other.degree)
        return FockVector(self.weight, self.padded(N) + other.padded(N))

    def __sub__(self, other: FockVector) -> FockVector:
        _check_weights(self, other)
        N = max(self.degree, other.degree)
        return FockVector(self.weight, self.padded(N) - other.padded(N))

    def __mul__(self, c: complex) -> FockVector:
        return FockVector(self.weight, self.coeffs * complex(c))

    __rmul__ = __mul__


def _check_weights(f: FockVector, g: FockVector) -> None:
    if f.weight != g.weight:
        raise WeightMismatchError(f"incompatible Fock spaces: r={f.r} vs r={g.r}")


def log_basis_norm_sq(n, r: GaussWeight | float):
    """log(n! / r**n), vectorised over n."""
    r = as_weight(r).r
    n = np.asarray(n, dtype=float)
    return gammaln(n + 1.0) - n * math.log(r)


def basis_norm_sq(n: int, r: GaussWeight | float) -> float:
    """Squared norm n!/r**n of the monomial z**n.

    Exact integer factorial up to n = 170 (one rounding), log-gamma beyond.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    rr = as_weight(r).r
    if n <= 170:
        try:
            return math.factorial(n) / rr**n
        except OverflowError:
            pass
    return math.exp(math.lgamma(n + 1) - n * math.log(rr))


def basis_vector(n: int, N: int, r: GaussWeight | float = 1.0) -> FockVector:
    c = np.zeros(N + 1, dtype=complex)
    c[n] = 1.0
    return FockVector(as_weight(r), c)


def zero_vector(N: int, r: GaussWeight | float = 1.0) -> FockVector:
    return FockVector(as_weight(r), np.zeros(N + 1, dtype=complex))


def kernel_coeffs(w: complex, N: int, r: float) -> np.ndarray:
    # c_n = c_{n-1} * conj(w) * sqrt(r/n): no factorials, no overflow
    c = np.empty(N + 1, dtype=complex)
    c[0] = 1.0
    wb = np.conj(complex(w))
    for n in range(1, N + 1):
        c[n] = c[n - 1] * wb * math.sqrt(r / n)
    return c


def kernel_vector(w: complex, N: int, r: GaussWeight | float = 1.0) -> FockVector:
    """Truncation to degree N of the reproducing kernel e_w(z) = exp(r z conj(w))."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    weight = as_weight(r)
    return FockVector(weight, kernel_coeffs(w, N, weight.r))


def kernel_tail_sq(w: complex, N: int, r: GaussWeight | float = 1.0) -> float:
    """Remainder sum_{n>N} (r|w|^2)^n / n! = ||e_w||^2 - ||P_N e_w||^2."""
    x = as_weight(r).r * abs(w) ** 2
    # Terms past N: accumulate until negligible relative to the running sum.
    term = math.exp((N + 1) * math.log(x) - math.lgamma(N + 2)) if x > 0 else 0.0
    total, n = 0.0, N + 1
    while term > 0.0 and (term > 1e-18 * total or n < N + 3):
        total += term
        n += 1
        term *= x / n
        if n > N + 100000:
            break
    return total


def inner(f: FockVector, g: FockVector) -> complex:
    """<f, g> = sum c_n(f) conj(c_n(g)); linear in f, conjugate-linear in g."""
    _check_weights(f, g)
    k = min(f.coeffs.size, g.coeffs.size)
    return complex(np.dot(f.coeffs[:k], np.conj(g.coeffs[:k])))


def eval_vector(f: FockVector, z):
    """Evaluate sum c_n u_n(z) by nested (Horner) multiplication.

    Accepts a scalar or an array of points.
    """
    z = np.asarray(z, dtype=complex)
    r = f.r
    c = f.coeffs
    val = np.full(z.shape, c[-1], dtype=complex)
    for n in range(c.size - 2, -1, -1):
        val = c[n] + z * math.sqrt(r / (n + 1)) * val
    return complex(val) if val.ndim == 0 else val


def embed_symbol(phi: EntireSymbol, N: int, r: GaussWeight | float = 1.0) -> FockVector:
    """Truncate an entire symbol to degree N: c_n = a_n (n!/r^n)^(1/2)."""
    weight = as_weight(r)
    logs = phi.log_coeffs(N)
    n = np.arange(N + 1)
    scaled = logs + 0.5 * log_basis_norm_sq(n, weight)
    with np.errstate(under="ignore"):
        c = np.exp(scaled)
    c[np.isneginf(logs.real)] = 0.0
    return FockVector(weight, c)


def kernel_gram(ws: Sequence[complex], N: int, r: GaussWeight | float = 1.0) -> np.ndarray:
    """Gram matrix G[i, j] = <P_N e_{w_i}, P_N e_{w_j}> of truncated kernels."""
    ws = [complex(w) for w in ws]
    if len(set(ws)) != len(ws):
        raise ValueError("kernel_gram needs pairwise distinct points")
    if len(ws) > N + 1:
        raise ValueError(f"{len(ws)} points exceed the dimension N+1={N + 1}")
    weight = as_weight(r)
    K = np.array([kernel_coeffs(w, N, weight.r) for w in ws])
    return K @ K.conj().T
