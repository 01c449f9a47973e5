"""Growth of annulus integrals for sigma and sigma/p on the square lattice.

    python3 scripts/sigma_growth_table.py --r 1.0
"""

import argparse

import numpy as np

from bargmann.counterexamples import LatticeSigma, sigma_domain_collapse, sigma_over_p_domain
from bargmann.fock import GaussWeight


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--r", type=float, default=1.0)
    args = ap.parse_args()
    s = LatticeSigma(GaussWeight(args.r))

    u = (np.arange(10) + 0.5) / 10
    z = s.a * (u[:, None] + 1j * u[None, :]).ravel()
    drift = max(np.max(np.abs(s.G(z + s.lattice_point(m, n), reduce=False) - s.G(z, reduce=False)))
                for m, n in [(1, 0), (0, 1)])
    print(f"lattice spacing a = {s.a:.6f}, periodicity drift of G = {drift:.2e}")

    d = sigma_domain_collapse(s)
    print(f"\nsigma: {d.verdict.value} ({d.model}, exponent {d.model_value:.3f})")
    for R, S, pa in zip(d.x, d.partial_sums, d.details["per_area"]):
        print(f"  R = {R:>4g}  integral = {S:12.5f}  per unit area = {pa:.5f}")

    print("\nsigma/p times z^j, p with k+2 lattice zeros")
    print(f"{'k':>3}{'j':>3}  {'model':<12}{'value':>10}  verdict       predicted")
    for k, j in [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (1, 3)]:
        d = sigma_over_p_domain(s, k, j)
        print(f"{k:>3}{j:>3}  {d.model:<12}{d.model_value:>10.4f}  {d.verdict.value:<13} {d.details['predicted']}")


if __name__ == "__main__":
    main()
