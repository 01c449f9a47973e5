"""Quadrature against the Gaussian measure, independent of coefficient space.

Polar factorisation: with t = r s**2 the measure (r/pi) exp(-r|z|^2) dA
becomes exp(-t) dt x dtheta/(2 pi), so a Gauss-Laguerre rule in t times
the uniform rule in theta is exact for f conj(g) whenever f, g are
polynomials of moderate degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .fock import FockVector, GaussWeight, as_weight, eval_vector


class NonFiniteSampleError(ValueError):
    """An integrand returned NaN or infinity at a quadrature node."""


def laguerre_nodes(n: int, tol: float = 1e-14, maxit: int = 100):
    """Gauss-Laguerre abscissae and weights for exp(-t) on [0, inf).

    Newton iteration on the three-term recurrence, seeded with the classical
    asymptotic guesses for successive roots.
    """
    if n < 1:
        raise ValueError("need at least one node")
    x = np.zeros(n)
    w = np.zeros(n)
    z = 0.0
    for i in range(n):
        if i == 0:
            z = 3.0 / (1.0 + 2.4 * n)
        elif i == 1:
            z += 15.0 / (1.0 + 2.5 * n)
        else:
            ai = i - 1
            z += (1.0 + 2.55 * ai) / (1.9 * ai) * (z - x[i - 2])
        for _ in range(maxit):
            p1, p2 = 1.0, 0.0
            for j in range(n):
                p3, p2 = p2, p1
                p1 = ((2 * j + 1 - z) * p2 - j * p3) / (j + 1)
            pp = n * (p1 - p2) / z
            z1 = z
            z = z1 - p1 / pp
            if abs(z - z1) <= tol * abs(z):
                break
        else:
            raise RuntimeError(f"Laguerre root {i} did not converge")
        x[i] = z
        # recompute p_{n-1} at the converged root for the weight formula
        p1, p2 = 1.0, 0.0
        for j in range(n):
            p3, p2 = p2, p1
            p1 = ((2 * j + 1 - z) * p2 - j * p3) / (j + 1)
        pp = n * (p1 - p2) / z
        w[i] = -1.0 / (pp * n * p2)
    return x, w


@dataclass(frozen=True)
class QuadratureRule:
    """Laguerre nodes ``t`` / weights ``v`` in t = r s^2, ``angles`` uniform points."""

    weight: GaussWeight
    radial_nodes: int = 40
    angles: int = 128
    t: np.ndarray = field(init=False, repr=False)
    v: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "weight", as_weight(self.weight))
        if self.radial_nodes < 1 or self.angles < 1:
            raise ValueError("quadrature sizes must be positive")
        t, v = laguerre_nodes(int(self.radial_nodes))
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)

    @property
    def r(self) -> float:
        return self.weight.r

    def points(self) -> np.ndarray:
        """Node grid of shape (radial, angles)."""
        s = np.sqrt(self.t / self.r)
        theta = 2 * np.pi * np.arange(self.angles) / self.angles
        return s[:, None] * np.exp(1j * theta)[None, :]


def _evaluator(f) -> Callable:
    if isinstance(f, FockVector):
        return lambda z: eval_vector(f, z)
    return f


def _sample(f, Z: np.ndarray) -> np.ndarray:
    vals = np.asarray(_evaluator(f)(Z), dtype=complex)
    if vals.shape != Z.shape:
        vals = np.broadcast_to(vals, Z.shape)
    bad = ~np.isfinite(vals)
    if bad.any():
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise NonFiniteSampleError(f"non-finite sample at node {idx}, z = {Z[idx]!r}")
    return vals


def gauss_inner(f, g, rule: QuadratureRule) -> complex:
    """<f, g> = (1/K) sum_j sum_k v_j f(z_jk) conj(g(z_jk)).

    ``f`` and ``g`` are FockVectors or vectorised callables.
    """
    Z = rule.points()
    F = _sample(f, Z)
    G = _sample(g, Z)
    return complex(np.sum(rule.v[:, None] * F * np.conj(G)) / rule.angles)


def gauss_norm_over_annulus(f, r: GaussWeight | float, R_inner: float, R_outer: float,
                            *, power: int = 0, log_modulus: bool = False,
                            panel_nodes: int = 8, panel_width: float | None = None,
                            angular_density: float = 16.0) -> float:
    """Integral of |f|^2 |z|^(2 power) dmu over R_inner < |z| < R_outer.

    Composite Gauss-Legendre panels in the radius and the trapezoid rule in
    angle (spectrally accurate for periodic integrands).  With
    ``log_modulus=True`` the callable returns log|f| instead of f, which lets
    integrands like |sigma|^2 exp(-r|z|^2) be formed without overflow.
    """
    rr = as_weight(r).r
    if not (0 <= R_inner < R_outer):
        raise ValueError("need 0 <= R_inner < R_outer")
    width = panel_width if panel_width is not None else 0.5 / math.sqrt(rr)
    n_panels = max(1, math.ceil((R_outer - R_inner) / width))
    edges = np.linspace(R_inner, R_outer, n_panels + 1)
    xg, wg = np.polynomial.legendre.leggauss(panel_nodes)
    K = max(32, int(math.ceil(2 * np.pi * R_outer * angular_density * math.sqrt(rr))))
    theta = 2 * np.pi * np.arange(K) / K
    e = np.exp(1j * theta)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        s = 0.5 * (b - a) * xg + 0.5 * (a + b)
        ws = 0.5 * (b - a) * wg
        Z = s[:, None] * e[None, :]
        if log_modulus:
            lm = np.asarray(f(Z), dtype=float)
            if not np.all(np.isfinite(lm) | np.isneginf(lm)):
                raise NonFiniteSampleError("non-finite log-modulus sample")
            log_integrand = 2 * lm - rr * s[:, None] ** 2
            with np.errstate(under="ignore"):
                dens = np.exp(log_integrand)
        else:
            vals = _sample(f, Z)
            dens = np.abs(vals) ** 2 * np.exp(-rr * s[:, None] ** 2)
        radial = dens.mean(axis=1) * s ** (2 * power)
        # dA = s ds dtheta; (r/pi) * 2 pi * mean over theta
        total += float(np.sum(ws * radial * s)) * 2 * rr
    return total


def cauchy_taylor(f, n_max: int, radius: float, samples: int) -> np.ndarray:
    """Taylor coefficients a_0..a_{n_max} from a discretised Cauchy integral."""
    if samples <= 2 * n_max:
        raise ValueError("need samples > 2 * n_max")
    if radius <= 0:
        raise ValueError("radius must be positive")
    theta = 2 * np.pi * np.arange(samples) / samples
    vals = _sample(f, radius * np.exp(1j * theta))
    c = np.fft.fft(vals) / samples
    n = np.arange(n_max + 1)
    return c[: n_max + 1] / radius ** n
