"""Entire symbols as Taylor-coefficient generators.

Every symbol produces *logarithmic* coefficients ``L_n = log|a_n| + i arg a_n``
(``-inf`` for a vanishing coefficient).  Working in log space keeps the
coefficients of order-2 functions such as ``exp(a z^2)`` meaningful far past
the point where ``a_n`` itself underflows, which is what the growth
classifier and the Fock-norm diagnostics need.
"""

from __future__ import annotations

import cmath
import enum
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaln

from .fock import GaussWeight, as_weight, log_basis_norm_sq

NEG_INF = complex(-np.inf, 0.0)


class SeriesTruncationError(ArithmeticError):
    """A truncated Taylor series cannot be trusted at the requested point."""


class NonConvergentError(ArithmeticError):
    """A Fock norm that should exist did not converge within the depth budget."""


# --------------------------------------------------------------------------
# log-space helpers
# --------------------------------------------------------------------------


def _clog(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    out = np.full(x.shape, NEG_INF, dtype=complex)
    nz = x != 0
    out[nz] = np.log(x[nz])
    return out


def logsumexp_c(x: np.ndarray, axis: int = 0) -> np.ndarray:
    """Complex log-sum-exp: log(sum(exp(x))) with -inf entries ignored."""
    x = np.asarray(x, dtype=complex)
    re_ = x.real
    with np.errstate(invalid="ignore"):
        m = np.max(np.where(np.isneginf(re_), -np.inf, re_), axis=axis, keepdims=True)
    m_safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(under="ignore", invalid="ignore"):
        terms = np.where(np.isneginf(re_), 0.0, np.exp(x - m_safe))
    s = np.sum(terms, axis=axis, keepdims=True)
    out = np.full(s.shape, NEG_INF, dtype=complex)
    ok = (s != 0) & np.isfinite(m)
    out[ok] = np.log(s[ok]) + m_safe[ok]
    return np.squeeze(out, axis=axis)


def log_cauchy_product(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Log coefficients of the product of two series (truncated Cauchy product)."""
    M = min(A.size, B.size)
    out = np.empty(M, dtype=complex)
    for n in range(M):
        out[n] = logsumexp_c(A[: n + 1] + B[n::-1])
    return out


def _exp_safe(L: np.ndarray) -> np.ndarray:
    with np.errstate(under="ignore", over="ignore"):
        v = np.exp(L)
    v[np.isneginf(np.asarray(L).real)] = 0.0
    return v


# --------------------------------------------------------------------------
# symbol kinds
# --------------------------------------------------------------------------


class EntireSymbol:
    """Base class.  Subclasses implement ``_log_coeffs(M)``."""

    kind: str = "abstract"

    def _log_coeffs(self, M: int) -> np.ndarray:
        raise NotImplementedError

    def log_coeffs(self, M: int) -> np.ndarray:
        """Log Taylor coefficients L_0..L_M (read-only)."""
        cache = self._cache
        have = cache.get("L")
        if have is None or have.size < M + 1:
            size = max(M + 1, 2 * have.size if have is not None else 0)
            L = np.asarray(self._log_coeffs(size - 1), dtype=complex)
            L.setflags(write=False)
            cache["L"] = have = L
        return have[: M + 1]

    def coeffs(self, M: int) -> np.ndarray:
        return _exp_safe(self.log_coeffs(M))

    @property
    def poly_degree(self) -> int | None:
        """Degree if the symbol is a polynomial, else None."""
        return None

    def closed_eval(self, z) -> np.ndarray | None:
        """Closed-form evaluation, or None when only the series is available."""
        return None

    def spec(self) -> str:
        return f"<{self.kind}>"

    # algebra
    def __mul__(self, other):
        if isinstance(other, EntireSymbol):
            return Product((self, other))
        return Product((Polynomial((complex(other),)), self))

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, EntireSymbol):
            other = Polynomial((complex(other),))
        return Sum((self, other))

    __radd__ = __add__

    def __neg__(self):
        return -1 * self


def _cache_field():
    return field(default_factory=dict, init=False, repr=False, compare=False, hash=False)


@dataclass(frozen=True, eq=True)
class Polynomial(EntireSymbol):
    coefficients: tuple = (0j,)
    _cache: dict = _cache_field()
    kind = "polynomial"

    def __post_init__(self):
        c = tuple(complex(x) for x in self.coefficients) or (0j,)
        object.__setattr__(self, "coefficients", c)

    def _log_coeffs(self, M):
        out = np.full(M + 1, NEG_INF, dtype=complex)
        k = min(M + 1, len(self.coefficients))
        out[:k] = _clog(self.coefficients[:k])
        return out

    @property
    def poly_degree(self):
        nz = [i for i, c in enumerate(self.coefficients) if c != 0]
        return nz[-1] if nz else 0

    def closed_eval(self, z):
        z = np.asarray(z, dtype=complex)
        return np.polyval(np.array(self.coefficients[::-1]), z)

    def spec(self):
        return "poly:" + ",".join(format_complex(c) for c in self.coefficients)


@dataclass(frozen=True, eq=True)
class ExpQuadratic(EntireSymbol):
    """exp(alpha z^2 + beta z + gamma)."""

    alpha: complex = 0j
    beta: complex = 0j
    gamma: complex = 0j
    _cache: dict = _cache_field()
    kind = "exp_quadratic"

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    def _log_coeffs(self, M):
        n = np.arange(M + 1)
        # exp(alpha z^2): nonzero at even n = 2m, a_{2m} = alpha^m / m!
        A = np.full(M + 1, NEG_INF, dtype=complex)
        if self.alpha == 0:
            A[0] = 0.0
        else:
            m = n[::2] // 2
            A[::2] = m * cmath.log(self.alpha) - gammaln(m + 1.0)
        if self.beta == 0:
            L = A
        else:
            B = n * cmath.log(self.beta) - gammaln(n + 1.0)
            L = log_cauchy_product(A, B.astype(complex))
        return L + self.gamma

    def closed_eval(self, z):
        z = np.asarray(z, dtype=complex)
        return np.exp(self.alpha * z * z + self.beta * z + self.gamma)

    def spec(self):
        return "exp:" + ",".join(format_complex(c) for c in (self.alpha, self.beta, self.gamma))


@dataclass(frozen=True, eq=True)
class Kernel(EntireSymbol):
    """Reproducing kernel e_w(z) = exp(r z conj(w))."""

    w: complex = 0j
    weight: GaussWeight = GaussWeight(1.0)
    _cache: dict = _cache_field()
    kind = "kernel"

    def __post_init__(self):
        object.__setattr__(self, "w", complex(self.w))
        object.__setattr__(self, "weight", as_weight(self.weight))

    @property
    def r(self):
        return self.weight.r

    def _log_coeffs(self, M):
        n = np.arange(M + 1)
        c = self.r * self.w.conjugate()
        if c == 0:
            out = np.full(M + 1, NEG_INF, dtype=complex)
            out[0] = 0.0
            return out
        return n * cmath.log(c) - gammaln(n + 1.0)

    @property
    def poly_degree(self):
        return 0 if self.w == 0 else None

    def closed_eval(self, z):
        z = np.asarray(z, dtype=complex)
        return np.exp(self.r * z * self.w.conjugate())

    def spec(self):
        return "kernel:" + format_complex(self.w)


@dataclass(frozen=True, eq=True)
class Product(EntireSymbol):
    factors: tuple = ()
    _cache: dict = _cache_field()
    kind = "product"

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    def _log_coeffs(self, M):
        if not self.factors:
            return Polynomial((1.0,))._log_coeffs(M)
        L = self.factors[0].log_coeffs(M)
        for f in self.factors[1:]:
            L = log_cauchy_product(L, f.log_coeffs(M))
        return L

    @property
    def poly_degree(self):
        degs = [f.poly_degree for f in self.factors]
        if any(d is None for d in degs):
            return None
        return sum(degs)

    def closed_eval(self, z):
        out = np.ones(np.shape(z), dtype=complex)
        for f in self.factors:
            v = f.closed_eval(z)
            if v is None:
                return None
            out = out * v
        return out

    def spec(self):
        return "prod:" + "*".join(f"({f.spec()})" for f in self.factors)


@dataclass(frozen=True, eq=True)
class Sum(EntireSymbol):
    terms: tuple = ()
    _cache: dict = _cache_field()
    kind = "sum"

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    def _log_coeffs(self, M):
        if not self.terms:
            return np.full(M + 1, NEG_INF, dtype=complex)
        return logsumexp_c(np.stack([t.log_coeffs(M) for t in self.terms]), axis=0)

    @property
    def poly_degree(self):
        degs = [t.poly_degree for t in self.terms]
        if any(d is None for d in degs):
            return None
        return max(degs, default=0)

    def closed_eval(self, z):
        out = np.zeros(np.shape(z), dtype=complex)
        for t in self.terms:
            v = t.closed_eval(z)
            if v is None:
                return None
            out = out + v
        return out

    def spec(self):
        return "sum:" + "+".join(f"({t.spec()})" for t in self.terms)


@dataclass(frozen=True, eq=True)
class Shifted(EntireSymbol):
    """Coefficient sequence a_{n+k} of a base symbol."""

    base: EntireSymbol = None
    k: int = 0
    _cache: dict = _cache_field()
    kind = "shifted"

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("shift must be nonnegative")

    def _log_coeffs(self, M):
        return self.base.log_coeffs(M + self.k)[self.k:]

    @property
    def poly_degree(self):
        d = self.base.poly_degree
        return None if d is None else max(d - self.k, 0)

    def spec(self):
        return f"shift:{self.k}:({self.base.spec()})"


LogRule = Callable[[np.ndarray], tuple]


@dataclass(frozen=True, eq=True)
class Custom(EntireSymbol):
    """Named coefficient rule.

    ``rule(n)`` receives an integer array and returns ``(log_magnitude, phase)``
    arrays; ``log_magnitude = -inf`` marks a zero coefficient.
    """

    name: str = "custom"
    rule: LogRule = None
    _cache: dict = _cache_field()
    kind = "custom"

    def _log_coeffs(self, M):
        n = np.arange(M + 1)
        mag, phase = self.rule(n)
        mag = np.broadcast_to(np.asarray(mag, dtype=float), n.shape)
        phase = np.broadcast_to(np.asarray(phase, dtype=float), n.shape)
        out = mag + 1j * np.where(np.isneginf(mag), 0.0, phase)
        return out

    def spec(self):
        return f"<custom:{self.name}>"


def taylor(phi: EntireSymbol, n: int) -> complex:
    """n-th Taylor coefficient at the origin."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return complex(_exp_safe(phi.log_coeffs(n)[n:n + 1])[0])


def scale(phi: EntireSymbol, c: complex) -> EntireSymbol:
    c = complex(c)
    if isinstance(phi, Polynomial):
        return Polynomial(tuple(c * a for a in phi.coefficients))
    return Product((Polynomial((c,)), phi))


# --------------------------------------------------------------------------
# calculus
# --------------------------------------------------------------------------


def _derived(name: str, base: EntireSymbol, shift: int, log_factor: Callable) -> Custom:
    def rule(n, base=base, shift=shift, log_factor=log_factor):
        n = np.asarray(n)
        L = np.full(n.shape, NEG_INF, dtype=complex)
        src = n + shift
        valid = src >= 0
        if np.any(valid):
            BL = base.log_coeffs(int(src[valid].max()))
            L[valid] = BL[src[valid]] + log_factor(n[valid])
        return L.real, L.imag

    return Custom(name, rule)


def derivative(phi: EntireSymbol) -> EntireSymbol:
    """phi'(z).  Closed-form kinds stay closed-form."""
    if isinstance(phi, Polynomial):
        c = phi.coefficients
        return Polynomial(tuple(n * c[n] for n in range(1, len(c))) or (0j,))
    if isinstance(phi, ExpQuadratic):
        return Product((Polynomial((phi.beta, 2 * phi.alpha)), phi))
    if isinstance(phi, Kernel):
        return Product((Polynomial((phi.r * phi.w.conjugate(),)), phi))
    if isinstance(phi, Product):
        fs = phi.factors
        return Sum(tuple(
            Product(fs[:i] + (derivative(fs[i]),) + fs[i + 1:]) for i in range(len(fs))
        ))
    if isinstance(phi, Sum):
        return Sum(tuple(derivative(t) for t in phi.terms))
    # b_n = (n+1) a_{n+1}
    return _derived(f"d({phi.spec()})", phi, 1, lambda n: np.log(n + 1.0))


def antiderivative(phi: EntireSymbol) -> EntireSymbol:
    """Primitive vanishing at 0: b_0 = 0, b_{n+1} = a_n/(n+1)."""
    if isinstance(phi, Polynomial):
        c = phi.coefficients
        return Polynomial((0j,) + tuple(c[n] / (n + 1) for n in range(len(c))))
    # n >= 1 reads a_{n-1}; n = 0 has no source index and stays zero
    return _derived(f"int({phi.spec()})", phi, -1, lambda n: -np.log(np.maximum(n, 1)))


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------


def eval_symbol(phi: EntireSymbol, z, M: int = 256, tol: float = 1e-12):
    """Value of phi at z (scalar or array).

    Closed forms are used when every constituent has one; otherwise the
    Taylor series with M+1 terms, refusing when the estimated tail exceeds
    ``tol`` relative to the magnitude of the summed terms.
    """
    closed = phi.closed_eval(z)
    if closed is not None:
        return complex(closed) if np.ndim(closed) == 0 else closed
    zz = np.asarray(z, dtype=complex)
    L = phi.log_coeffs(M)
    n = np.arange(M + 1)
    flat = zz.reshape(-1)
    logz = _clog(flat)
    out = np.empty(flat.shape, dtype=complex)
    for i, (zi, lz) in enumerate(zip(flat, logz)):
        if zi == 0:
            out[i] = _exp_safe(L[:1])[0]
            continue
        terms_log = L + n * lz
        terms = _exp_safe(terms_log)
        out[i] = terms.sum()
        mags = terms_log.real
        scale_ = max(abs(out[i]), float(np.abs(terms).max()), 1e-300)
        tail = _tail_estimate(mags)
        if tail > tol * scale_:
            raise SeriesTruncationError(
                f"series for {phi.spec()} with {M + 1} terms has tail ~{tail:.3g} at z={zi}"
            )
    out = out.reshape(zz.shape)
    return complex(out) if out.ndim == 0 else out


def _tail_estimate(log_mags: np.ndarray, window: int = 16) -> float:
    finite = np.flatnonzero(np.isfinite(log_mags))
    if finite.size == 0:
        return 0.0
    last = finite[-window:]
    if last[-1] < log_mags.size - 1 - window:
        # coefficients stopped well before the truncation point
        return 0.0
    if last.size < 2:
        return math.exp(log_mags[last[-1]])
    # geometric model for the decay of the largest recent terms
    slope = (log_mags[last[-1]] - log_mags[last[0]]) / (last[-1] - last[0])
    t_last = math.exp(min(log_mags[last[-1]], 700.0))
    if slope >= 0:
        return math.inf if t_last > 0 else 0.0
    q = math.exp(slope)
    return t_last * q / (1 - q)


# --------------------------------------------------------------------------
# growth classification
# --------------------------------------------------------------------------


class LambdaVerdict(str, enum.Enum):
    IN = "InLambda"
    OUT = "NotInLambda"
    UNKNOWN = "BoundaryUnknown"


class FockVerdict(str, enum.Enum):
    IN = "InF"
    OUT = "NotInF"
    UNKNOWN = "BoundaryUnknown"


@dataclass(frozen=True)
class GrowthReport:
    order_estimate: float
    type_estimate: float
    lambda_verdict: LambdaVerdict
    fock_verdict: FockVerdict
    evidence: tuple
    rule_used: str
    r: float
    depth: int

    def to_dict(self) -> dict:
        return {
            "order_estimate": self.order_estimate,
            "type_estimate": self.type_estimate,
            "lambda_verdict": self.lambda_verdict.value,
            "fock_verdict": self.fock_verdict.value,
            "rule_used": self.rule_used,
            "r": self.r,
            "depth": self.depth,
            "evidence": [[n, v] for n, v in self.evidence],
        }


ORDER_DELTA = 0.1
TYPE_DELTA_FRACTION = 0.02


def _closed_form_verdict(phi: EntireSymbol, r: float):
    """(lambda, fock) verdict from structure alone, or None."""
    info = _gaussian_exponent(phi)
    if info is not None:
        alpha, is_zero = info
        if is_zero or abs(alpha) < r / 2:
            return LambdaVerdict.IN, FockVerdict.IN
        return LambdaVerdict.OUT, FockVerdict.OUT
    if isinstance(phi, Sum):
        sub = [_closed_form_verdict(t, r) for t in phi.terms]
        if any(s is None for s in sub):
            return None
        outs = [s for s in sub if s[0] is LambdaVerdict.OUT]
        if not outs:
            return LambdaVerdict.IN, FockVerdict.IN
        if len(outs) == 1:
            # Lambda and F are vector spaces: one bad term cannot be cancelled
            fock = FockVerdict.OUT if outs[0][1] is FockVerdict.OUT else FockVerdict.UNKNOWN
            return LambdaVerdict.OUT, fock
        return None
    if isinstance(phi, Shifted):
        # (phi - p)/z^k: polynomial factors do not move Lambda or F membership
        return _closed_form_verdict(phi.base, r)
    return None


def _gaussian_exponent(phi: EntireSymbol):
    """For products of exp-quadratics with exponential-type factors, return
    (total quadratic exponent, symbol-is-identically-zero)."""
    if isinstance(phi, Polynomial):
        return 0j, all(c == 0 for c in phi.coefficients)
    if isinstance(phi, Kernel):
        return 0j, False
    if isinstance(phi, ExpQuadratic):
        return phi.alpha, False
    if isinstance(phi, Product):
        total, zero = 0j, False
        for f in phi.factors:
            sub = _gaussian_exponent(f)
            if sub is None:
                return None
            total += sub[0]
            zero = zero or sub[1]
        return total, zero
    if isinstance(phi, Sum):
        subs = [_gaussian_exponent(t) for t in phi.terms]
        if subs and all(s is not None and s[0] == 0 for s in subs):
            return 0j, False
        return None
    return None


def _order_and_type(L: np.ndarray, depth: int):
    n = np.arange(L.size)
    lo = max(depth // 2, 2)
    window = np.arange(lo, depth + 1)
    mags = L.real[window]
    finite = np.isfinite(mags)
    evidence = []
    for k in np.arange(10, depth + 1, max(depth // 20, 1)):
        m = L.real[k]
        if np.isfinite(m) and m < 0:
            evidence.append((int(k), float(k * math.log(k) / -m)))
    if not np.any(finite):
        return 0.0, 0.0, tuple(evidence)
    # upper envelope of |a_n| on blocks, then y = -log|a_n|/n against log n
    block = max(4, depth // 40)
    xs, ys = [], []
    for start in range(0, window.size, block):
        sl = slice(start, start + block)
        idx = window[sl][finite[sl]]
        if idx.size == 0:
            continue
        j = idx[np.argmax(L.real[idx])]
        xs.append(math.log(j))
        ys.append(-L.real[j] / j)
    if len(xs) >= 2:
        slope = np.polyfit(xs, ys, 1)[0]
        order = 1.0 / slope if slope > 1e-12 else math.inf
    else:
        order = 0.0
    idx = window[finite]
    with np.errstate(over="ignore"):
        type_vals = np.exp(np.log(idx) + 2.0 * L.real[idx] / idx - math.log(2.0) - 1.0)
    return float(order), float(np.max(type_vals)), tuple(evidence)


def classify_growth(phi: EntireSymbol, r: GaussWeight | float = 1.0, depth: int = 400) -> GrowthReport:
    """Order/type estimates and membership verdicts for F and Lambda."""
    if depth < 50:
        raise ValueError("depth must be at least 50")
    rr = as_weight(r).r
    L = phi.log_coeffs(depth)
    order, typ, evidence = _order_and_type(L, depth)

    lam, fock, rule = LambdaVerdict.UNKNOWN, FockVerdict.UNKNOWN, "asymptotic"
    d_type = TYPE_DELTA_FRACTION * rr
    if order < 2 - ORDER_DELTA or (abs(order - 2) <= ORDER_DELTA and typ < rr / 2 - d_type):
        lam, fock = LambdaVerdict.IN, FockVerdict.IN
    elif order > 2 + ORDER_DELTA or (abs(order - 2) <= ORDER_DELTA and typ > rr / 2 + d_type):
        lam, fock = LambdaVerdict.OUT, FockVerdict.OUT

    closed = _closed_form_verdict(phi, rr)
    if closed is not None:
        lam, fock = closed
        rule = "closed_form"
    return GrowthReport(order, typ, lam, fock, evidence, rule, rr, depth)


# --------------------------------------------------------------------------
# Fock norms and the Lambda bound
# --------------------------------------------------------------------------


def log_fock_norm_terms(phi: EntireSymbol, r: GaussWeight | float, N: int) -> np.ndarray:
    """log(|a_n|^2 n!/r^n) for n = 0..N (-inf where a_n = 0)."""
    L = phi.log_coeffs(N)
    return 2.0 * L.real + log_basis_norm_sq(np.arange(N + 1), r)


def fock_norm_partial(phi: EntireSymbol, r: GaussWeight | float, N: int) -> np.ndarray:
    """Partial sums S_n = sum_{k<=n} |a_k|^2 k!/r^k, n = 0..N."""
    logS = np.logaddexp.accumulate(log_fock_norm_terms(phi, r, N))
    with np.errstate(over="ignore", under="ignore"):
        return np.exp(logS)


def converged_fock_norm(phi: EntireSymbol, r: GaussWeight | float, max_depth: int = 4096,
                        start: int = 64, rel_tol: float = 1e-17) -> float:
    """||phi||_F from partial sums, refusing if the terms have not died out."""
    depth = start
    while True:
        t = log_fock_norm_terms(phi, r, depth)
        logS = np.logaddexp.reduce(t)
        tail = t[-8:]
        decreasing = np.all(np.diff(tail[np.isfinite(tail)]) <= 1e-12)
        if np.isneginf(logS):
            return 0.0
        if np.all(tail - logS < math.log(rel_tol)) and decreasing:
            return math.exp(0.5 * logS)
        if depth >= max_depth:
            raise NonConvergentError(
                f"||{phi.spec()}||_F: partial sums not converged at depth {depth} "
                f"(last term / sum = {math.exp(min(tail.max() - logS, 700.0)):.3g})"
            )
        depth = min(2 * depth, max_depth)


def lambda_bound_witness(phi: EntireSymbol, N: float, r: GaussWeight | float, samples,
                         max_depth: int = 4096):
    """Constant C and the worst excess of |phi(z)| over C exp(r|z|^2/2 - N|z|).

    C is the largest Fock norm of phi * e_{w_k} over the four points
    w_k = (sqrt(2) N / r) i^k.
    """
    rr = as_weight(r).r
    weight = as_weight(r)
    norms = []
    for k in range(4):
        wk = (math.sqrt(2.0) * N / rr) * 1j**k
        norms.append(converged_fock_norm(Product((phi, Kernel(wk, weight))), weight, max_depth))
    C = max(norms)
    z = np.asarray(samples, dtype=complex).reshape(-1)
    vals = np.abs(np.asarray(eval_symbol(phi, z), dtype=complex))
    bound = C * np.exp(rr * np.abs(z) ** 2 / 2 - N * np.abs(z))
    return C, float(np.max(vals - bound))


# --------------------------------------------------------------------------
# mini-language
# --------------------------------------------------------------------------


class SymbolSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        self.message, self.text, self.pos = message, text, pos
        super().__init__(f"{message}\n  {text}\n  {' ' * pos}^")


_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(
    rf"^(?P<re>[+-]?{_NUM})?(?:(?P<sign>[+-])(?P<im>{_NUM})?i)?$|^(?P<pure>[+-]?{_NUM})?i$"
)


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``a+bi``, ``a-bi``, ``bi`` or ``i`` (no whitespace)."""
    m = _COMPLEX_RE.match(text)
    if not text or m is None:
        raise ValueError(f"malformed complex literal {text!r}")
    if m.group("sign") is None and text.endswith("i"):
        p = m.group("pure")
        return complex(0.0, float(p) if p else 1.0)
    re_ = float(m.group("re")) if m.group("re") else 0.0
    if m.group("sign") is None:
        return complex(re_, 0.0)
    im = float(m.group("im")) if m.group("im") else 1.0
    return complex(re_, im if m.group("sign") == "+" else -im)


def format_complex(c: complex) -> str:
    c = complex(c) + 0.0  # drop negative zeros
    return f"{c.real!r}{'+' if c.imag >= 0 else '-'}{abs(c.imag)!r}i"


class _Parser:
    def __init__(self, text: str, weight: GaussWeight):
        self.text, self.pos, self.weight = text, 0, weight

    def error(self, msg, pos=None):
        raise SymbolSyntaxError(msg, self.text, self.pos if pos is None else pos)

    def peek(self, s):
        return self.text.startswith(s, self.pos)

    def expect(self, s):
        if not self.peek(s):
            self.error(f"expected {s!r}")
        self.pos += len(s)

    def parse(self) -> EntireSymbol:
        sym = self.symbol()
        if self.pos != len(self.text):
            self.error("unexpected trailing input")
        return sym

    def _tag(self):
        m = re.compile(r"[a-z]+:").match(self.text, self.pos)
        if m is None:
            self.error("expected one of poly:, exp:, kernel:, shift:, prod:, sum:")
        self.pos = m.end()
        return m.group()[:-1]

    def _literal_list(self):
        # literals run to the closing ')' of the enclosing group or to the end
        start = self.pos
        end = self.text.find(")", start)
        end = len(self.text) if end < 0 else end
        self.pos = end
        items, offset = [], start
        for part in self.text[start:end].split(","):
            try:
                items.append(parse_complex(part))
            except ValueError:
                self.error(f"malformed complex literal {part!r}", offset)
            offset += len(part) + 1
        return items

    def _group(self):
        self.expect("(")
        sym = self.symbol()
        self.expect(")")
        return sym

    def symbol(self) -> EntireSymbol:
        tag_pos = self.pos
        tag = self._tag()
        if tag == "poly":
            return Polynomial(tuple(self._literal_list()))
        if tag == "exp":
            vals = self._literal_list()
            if len(vals) != 3:
                self.error("exp: takes alpha,beta,gamma", tag_pos)
            return ExpQuadratic(*vals)
        if tag == "kernel":
            vals = self._literal_list()
            if len(vals) != 1:
                self.error("kernel: takes one point", tag_pos)
            return Kernel(vals[0], self.weight)
        if tag == "shift":
            m = re.compile(r"\d+").match(self.text, self.pos)
            if m is None:
                self.error("shift: needs a nonnegative integer")
            self.pos = m.end()
            self.expect(":")
            return Shifted(self._group(), int(m.group()))
        if tag in ("prod", "sum"):
            sep = "*" if tag == "prod" else "+"
            parts = [self._group()]
            while self.peek(sep):
                self.pos += 1
                parts.append(self._group())
            return Product(tuple(parts)) if tag == "prod" else Sum(tuple(parts))
        self.error(f"unknown symbol kind {tag!r}", tag_pos)


def parse_symbol(text: str, r: GaussWeight | float = 1.0) -> EntireSymbol:
    """Parse the symbol mini-language.

    ``poly:c0,c1,...``  ``exp:alpha,beta,gamma``  ``kernel:w``
    ``shift:k:(...)``  ``prod:(...)*(...)``  ``sum:(...)+(...)``
    """
    return _Parser(text, as_weight(r)).parse()


def parse_symbols(texts: Sequence[str], r) -> list[EntireSymbol]:
    return [parse_symbol(t, r) for t in texts]
