"""Domain pathologies of unbounded multiplication operators on Fock space.

Every construction is reduced to a nondecreasing sequence (partial sums of a
norm series, or integrals over growing annuli) and a fitted growth model.
"""

from __future__ import annotations

import enum
import io
import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .fock import GaussWeight, as_weight, log_basis_norm_sq
from .oracle import gauss_norm_over_annulus
from .symbols import Custom, EntireSymbol, ExpQuadratic, FockVerdict, fock_norm_partial

# local log-slope exponent separating the three growth regimes
EXPONENT_BAND = 0.35
CAUCHY_TAIL_TOL = 1e-6
ANNULUS_REL_TOL = 0.05


class Verdict(str, enum.Enum):
    CONVERGES = "Converges"
    DIVERGES = "Diverges"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class DivergenceDiagnostic:
    """Checkpointed partial values S(x) of a nonnegative series or integral."""

    label: str
    x: np.ndarray = field(repr=False)
    partial_sums: np.ndarray = field(repr=False)
    model: str
    model_value: float
    verdict: Verdict
    tail_estimate: float
    details: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "x": [float(v) for v in self.x],
            "partial_sums": [float(v) for v in self.partial_sums],
            "fitted_model": {"kind": self.model, "value": self.model_value},
            "verdict": self.verdict.value,
            "tail_estimate": self.tail_estimate,
            "details": self.details,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "partial"])
        for a, b in zip(self.x, self.partial_sums):
            w.writerow([format(float(a), ".17g"), format(float(b), ".17g")])
        return buf.getvalue()


def geometric_checkpoints(M: int, per_decade: int = 12, start: int = 10) -> np.ndarray:
    pts = np.unique(np.round(np.geomspace(start, M, max(2, int(per_decade * math.log10(M / start)) + 1))))
    return pts.astype(np.int64)


def fit_growth(x: np.ndarray, S: np.ndarray, fit_points: int | None = None):
    """(model, value, exponent) from local slopes dS/dln x.

    The local slope behaves like x^e.  e clearly below 0 means the sequence
    converges (value = extrapolated limit), e near 0 means logarithmic growth
    (value = slope against ln x), e clearly above 0 means power growth
    (value = e).
    """
    x = np.asarray(x, dtype=float)
    S = np.asarray(S, dtype=float)
    if not np.all(np.isfinite(S)):
        return "power", math.inf, math.inf
    dS = np.diff(S)
    dl = np.diff(np.log(x))
    s = dS / dl
    xm = np.sqrt(x[1:] * x[:-1])
    if fit_points is not None:
        s, xm = s[-fit_points:], xm[-fit_points:]
    if np.all(s <= 0):
        return "convergent", float(S[-1]), -math.inf
    pos = s > 0
    if pos.sum() < 2:
        return "convergent", float(S[-1]), -math.inf
    e = float(np.polyfit(np.log(xm[pos]), np.log(s[pos]), 1)[0])
    if e < -EXPONENT_BAND:
        return "convergent", float(S[-1] + s[-1] / abs(e)), e
    if e <= EXPONENT_BAND:
        return "logarithmic", float(s[-1]), e
    return "power", e, e


def _diagnose_series(label: str, terms: np.ndarray, checkpoints: np.ndarray | None = None,
                     details: dict | None = None) -> DivergenceDiagnostic:
    """Partial sums of a nonnegative series, judged on geometric checkpoints.

    Converges needs a convergent fit and a last increment (Cauchy tail) below
    CAUCHY_TAIL_TOL; Diverges needs a logarithmic or power fit.
    """
    S = np.cumsum(terms)
    M = terms.size
    cps = checkpoints if checkpoints is not None else geometric_checkpoints(M)
    x = cps.astype(float)
    Sx = S[cps - 1]
    half = max(4, len(x) // 2)
    model, value, e = fit_growth(x, Sx, fit_points=half)
    last_term = float(terms[-1])
    if model == "convergent":
        verdict = Verdict.CONVERGES if last_term <= CAUCHY_TAIL_TOL else Verdict.INCONCLUSIVE
        tail = value - float(Sx[-1])
    else:
        verdict = Verdict.DIVERGES
        tail = math.inf
    d = {"local_exponent": e, "last_term": last_term, "M": int(M)}
    d.update(details or {})
    return DivergenceDiagnostic(label, x, Sx, model, float(value), verdict, float(tail), d)


def _diagnose_shells(label: str, R: np.ndarray, S: np.ndarray,
                     details: dict | None = None) -> DivergenceDiagnostic:
    """Annulus integrals over growing radii; Converges when the extrapolated
    remainder is at most ANNULUS_REL_TOL of the current value.  Only the two
    outermost shells enter the fit: inner shells are pre-asymptotic."""
    model, value, e = fit_growth(R, S, fit_points=2 if len(R) >= 3 else None)
    if model == "convergent":
        tail = value - float(S[-1])
        ok = tail <= ANNULUS_REL_TOL * max(float(S[-1]), 1e-300)
        verdict = Verdict.CONVERGES if ok else Verdict.INCONCLUSIVE
    else:
        tail = math.inf
        verdict = Verdict.DIVERGES
    d = {"local_exponent": e}
    d.update(details or {})
    return DivergenceDiagnostic(label, np.asarray(R, float), np.asarray(S, float), model,
                                float(value), verdict, float(tail), d)


# --------------------------------------------------------------------------
# the borderline function and its shifts
# --------------------------------------------------------------------------


def borderline_symbol(r: GaussWeight | float = 1.0) -> EntireSymbol:
    """f = sum a_n z^n with a_n = (||z^n||^2 (n+1)^2)^(-1/2): unit-basis coefficients 1/(n+1)."""
    weight = as_weight(r)

    def rule(n, weight=weight):
        n = np.asarray(n, dtype=float)
        return -0.5 * log_basis_norm_sq(n, weight) - np.log(n + 1.0), np.zeros_like(n)

    return Custom(f"borderline[r={weight.r:g}]", rule)


def borderline_f(r: GaussWeight | float = 1.0, M: int = 10_000):
    """(||f||^2 diagnostic, ||zf||^2 diagnostic) over the first M coefficients.

    In the unit basis c_n = 1/(n+1), and z u_n = sqrt((n+1)/r) u_(n+1), so
    ||f||^2 = sum (n+1)^-2 and ||zf||^2 = (1/r) sum (n+1)^-1.
    """
    if M < 100:
        raise ValueError("M must be at least 100")
    rr = as_weight(r).r
    k = np.arange(1, M + 1, dtype=float)
    f_terms = 1.0 / k**2
    zf_terms = 1.0 / (rr * k)
    f_diag = _diagnose_series("||f||^2", f_terms, details={"limit": math.pi**2 / 6})
    zf_diag = _diagnose_series("||zf||^2", zf_terms, details={"predicted_slope": 1.0 / rr})
    return f_diag, zf_diag


def shifted_g_terms(k: int, j: int, r: GaussWeight | float, M: int) -> np.ndarray:
    """Terms of ||z^j g||^2 for g = sum_n a_(n+k) z^n (a_n the borderline coefficients).

    |a_(n+k)|^2 ||z^(n+j)||^2 = r^(k-j) (n+j)! / ((n+k)! (n+k+1)^2), of size n^(j-k-2).
    """
    if k < 0 or j < 0:
        raise ValueError("k and j must be nonnegative")
    rr = as_weight(r).r
    n = np.arange(M, dtype=float)
    logt = ((k - j) * math.log(rr) + gammaln(n + j + 1) - gammaln(n + k + 1)
            - 2 * np.log(n + k + 1))
    return np.exp(logt)


def shifted_g(k: int, j: int, r: GaussWeight | float = 1.0, M: int = 100_000) -> DivergenceDiagnostic:
    """Is z^j g in F?  Predicted: exactly when j <= k."""
    terms = shifted_g_terms(k, j, r, M)
    return _diagnose_series(f"||z^{j} g_{k}||^2", terms,
                            details={"k": k, "j": j, "predicted": "Converges" if j <= k else "Diverges"})


# --------------------------------------------------------------------------
# Gaussian symbols
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianDomainReport:
    w: complex
    a: float
    r: float
    memberships: dict
    interval: tuple
    a_admissible: bool
    r_general: bool

    @property
    def matches_prediction(self) -> bool:
        return all(m["observed"] == m["predicted"] for m in self.memberships.values())

    def to_dict(self) -> dict:
        return {
            "w": {"re": self.w.real, "im": self.w.imag},
            "a": self.a,
            "r": self.r,
            "memberships": self.memberships,
            "interval": list(self.interval),
            "a_admissible": self.a_admissible,
            "r_general": self.r_general,
            "matches_prediction": self.matches_prediction,
        }


def gaussian_membership(c: complex, r: GaussWeight | float = 1.0, M: int = 400) -> dict:
    """Is exp(c z^2) in F?  Observed from partial norm sums, predicted by |c| < r/2."""
    rr = as_weight(r).r
    S = fock_norm_partial(ExpQuadratic(complex(c)), rr, M)
    idx = np.arange(2, M + 1, 2)  # only even coefficients are nonzero
    model, value, e = fit_growth(idx.astype(float), S[idx])
    terms = np.diff(S[idx])
    last = float(terms[-1]) if terms.size else 0.0
    if model == "convergent" and last <= CAUCHY_TAIL_TOL:
        observed = FockVerdict.IN.value
    elif model == "convergent":
        observed = FockVerdict.UNKNOWN.value
    else:
        observed = FockVerdict.OUT.value
    predicted = FockVerdict.IN.value if abs(c) < rr / 2 else FockVerdict.OUT.value
    return {"c": {"re": complex(c).real, "im": complex(c).imag}, "observed": observed,
            "predicted": predicted, "model": model, "local_exponent": e}


def gaussian_domain_demo(w: complex, a: float, r: GaussWeight | float = 1.0,
                         M: int = 400) -> GaussianDomainReport:
    """Split exp(w z^2) = exp((1-a) w z^2) * exp(a w z^2) with both factors in F.

    Both exp(-a w z^2) and exp((1-a) w z^2) lie in F exactly when
    a is in (1 - r/(2|w|), r/(2|w|)).
    """
    rr = as_weight(r).r
    w = complex(w)
    mem = {
        "exp(-a w z^2)": gaussian_membership(-a * w, rr, M),
        "exp((1-a) w z^2)": gaussian_membership((1 - a) * w, rr, M),
        "exp(w z^2)": gaussian_membership(w, rr, M),
    }
    if w == 0:
        interval = (-math.inf, math.inf)
    else:
        half = rr / (2 * abs(w))
        interval = (1 - half, half)
    admissible = interval[0] < a < interval[1]
    return GaussianDomainReport(w, float(a), rr, mem, interval, admissible, rr != 1.0)


# --------------------------------------------------------------------------
# Weierstrass sigma on the square lattice sqrt(pi/r)(Z + iZ)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeSigma:
    """sigma for the lattice a(Z + iZ), a = sqrt(pi/r).

    Evaluated through the Jacobi product with nome q = exp(-pi):

        sigma(z) = (a/pi) exp(r z^2/2) sin v prod_k (1 - 2 q^2k cos 2v + q^4k) / (1 - q^2k)^2,

    v = pi z / a.  ``rows`` product factors suffice inside the fundamental
    cell (q^(2 rows) is the relative error); other points are reduced with

        sigma(z + w) = (-1)^(m+n+mn) exp(r conj(w) (z + w/2)) sigma(z),  w = a(m + i n).
    """

    weight: GaussWeight = GaussWeight(1.0)
    rows: int = 8

    def __post_init__(self):
        object.__setattr__(self, "weight", as_weight(self.weight))
        if self.rows < 1:
            raise ValueError("rows must be positive")

    @property
    def r(self) -> float:
        return self.weight.r

    @property
    def a(self) -> float:
        return math.sqrt(math.pi / self.r)

    @property
    def eta1(self) -> float:
        """Quasi-period constant for the period a: sigma(z+a) = -exp(eta1 (z + a/2)) sigma(z)."""
        return self.r * self.a

    def lattice_point(self, m: int, n: int) -> complex:
        return self.a * complex(m, n)

    def _log_core(self, z: np.ndarray, rows: np.ndarray | int) -> np.ndarray:
        """log of the unreduced product representation (complex, branch arbitrary)."""
        v = np.pi * z / self.a
        q = math.exp(-math.pi)
        out = np.log(self.a / np.pi) + self.r * z**2 / 2
        with np.errstate(divide="ignore"):
            out = out + np.log(np.sin(v).astype(complex))
        kmax = int(np.max(rows))
        c2 = np.cos(2 * v)
        for k in range(1, kmax + 1):
            q2 = q ** (2 * k)
            factor = np.log((1 - 2 * q2 * c2 + q2 * q2).astype(complex)) - 2 * math.log1p(-q2)
            out = out + np.where(k <= rows, factor, 0.0)
        return out

    def _reduce(self, z: np.ndarray):
        m = np.round(z.real / self.a)
        n = np.round(z.imag / self.a)
        w = self.a * (m + 1j * n)
        return z - w, w, m, n

    def log_sigma(self, z, reduce: bool = True) -> np.ndarray:
        """Complex log sigma (imaginary part modulo 2 pi); -inf at lattice points."""
        z = np.asarray(z, dtype=complex)
        if reduce:
            z0, w, m, n = self._reduce(z)
            sign = np.where(((m + n + m * n) % 2) != 0, 1j * np.pi, 0.0)
            core = self._log_core(z0, self.rows)
            return core + sign + self.r * np.conj(w) * (z0 + w / 2)
        # unreduced: enough rows that q^(2k) beats exp(2|Im v|)
        extra = np.ceil(np.abs(z.imag) / self.a).astype(int)
        return self._log_core(z, self.rows + extra)

    def __call__(self, z, reduce: bool = True):
        return sigma_eval(self, z, reduce)

    def log_abs(self, z, reduce: bool = True) -> np.ndarray:
        return np.real(self.log_sigma(z, reduce))

    def G(self, z, reduce: bool = True) -> np.ndarray:
        """|sigma(z)| exp(-r|z|^2/2), periodic over the lattice."""
        z = np.asarray(z, dtype=complex)
        with np.errstate(under="ignore"):
            return np.exp(self.log_abs(z, reduce) - self.r * np.abs(z) ** 2 / 2)


def sigma_eval(s: LatticeSigma, z, reduce: bool = True):
    """sigma(z) (exactly 0 on lattice points)."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(under="ignore", over="ignore"):
        val = np.exp(s.log_sigma(z, reduce))
    val = np.where(np.isfinite(val), val, 0.0) if np.ndim(val) else val
    return complex(val) if np.ndim(val) == 0 else val


def _shells(log_modulus, r: float, R_list: Sequence[float], power: int = 0,
            R0: float = 1.0) -> np.ndarray:
    vals, total, lo = [], 0.0, R0
    for R in R_list:
        if R <= lo:
            raise ValueError("R_list must be increasing and above the inner radius")
        total += gauss_norm_over_annulus(log_modulus, r, lo, R, power=power, log_modulus=True)
        vals.append(total)
        lo = R
    return np.array(vals)


def sigma_domain_collapse(s: LatticeSigma, R_list: Sequence[float] = (2, 4, 8)) -> DivergenceDiagnostic:
    """Integral of |sigma|^2 dmu over 1 < |z| < R: grows like the area."""
    R = np.asarray(R_list, dtype=float)
    S = _shells(lambda z: s.log_abs(z), s.r, R)
    area = np.pi * (R**2 - 1)
    return _diagnose_shells("int |sigma|^2 dmu", R, S,
                            details={"per_area": (S / area).tolist(), "r": s.r})


def nearest_lattice_points(s: LatticeSigma, count: int) -> list[complex]:
    """The ``count`` lattice points closest to 0, ordered by modulus then angle."""
    span = int(math.ceil(math.sqrt(count))) + 2
    pts = [s.lattice_point(m, n) for m in range(-span, span + 1) for n in range(-span, span + 1)]
    pts.sort(key=lambda w: (round(abs(w), 12), math.atan2(w.imag, w.real) % (2 * math.pi)))
    return pts[:count]


def sigma_over_p_domain(s: LatticeSigma, k: int, j: int,
                        R_list: Sequence[float] = (2, 4, 8, 16),
                        zeros: Sequence[complex] | None = None) -> DivergenceDiagnostic:
    """Integral of |sigma/p|^2 |z|^(2j) dmu over 1 < |z| < R.

    p is monic with k+2 simple zeros at lattice points, so sigma/p is entire
    and |sigma/p|^2 exp(-r|z|^2) |z|^(2j) ~ |z|^(2(j-k-2)) times a periodic
    factor: bounded for j <= k, logarithmic for j = k+1, power growth beyond.
    """
    if k < 0 or j < 0:
        raise ValueError("k and j must be nonnegative")
    zs = list(zeros) if zeros is not None else nearest_lattice_points(s, k + 2)
    if len(zs) != k + 2 or len(set(zs)) != len(zs):
        raise ValueError(f"p needs k+2 = {k + 2} distinct zeros")
    for w in zs:
        m, n = w.real / s.a, w.imag / s.a
        if abs(m - round(m)) > 1e-9 or abs(n - round(n)) > 1e-9:
            raise ValueError(f"zero {w} of p is not a lattice point; sigma/p would not be entire")
    zs = [s.lattice_point(round(w.real / s.a), round(w.imag / s.a)) for w in zs]

    def log_mod(z):
        z = np.asarray(z, dtype=complex)
        # nudge nodes that land on a zero of p (removable singularity)
        for w in zs:
            z = np.where(np.abs(z - w) < 1e-9, z + 1e-7, z)
        lp = sum(np.log(np.abs(z - w)) for w in zs)
        return s.log_abs(z) - lp

    R = np.asarray(R_list, dtype=float)
    S = _shells(log_mod, s.r, R, power=j)
    predicted = "Converges" if j <= k else "Diverges"
    return _diagnose_shells(f"int |sigma/p|^2 |z|^{2 * j} dmu", R, S,
                            details={"k": k, "j": j, "zeros": [[w.real, w.imag] for w in zs],
                                     "predicted": predicted})
