"""Partial norm sums for the borderline function f and for z f.

f has orthonormal-basis coefficients 1/(n+1): its norm converges while
the norm of z f grows like (1/r) ln M.

    python3 scripts/borderline_divergence.py --M 1000000
"""

import argparse
import math

from bargmann.counterexamples import borderline_f, shifted_g


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--M", type=int, default=1_000_000)
    ap.add_argument("--r", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    args = ap.parse_args()

    for r in args.r:
        f, zf = borderline_f(r, args.M)
        print(f"r = {r:g}")
        print(f"  ||f||^2  -> {f.partial_sums[-1]:.10f}  (pi^2/6 = {math.pi**2 / 6:.10f}), {f.verdict.value}")
        print(f"  ||zf||^2 slope vs ln M = {zf.model_value:.6f}  (1/r = {1 / r:.6f}), {zf.verdict.value}")
        for x, s in list(zip(zf.x, zf.partial_sums))[::12]:
            print(f"    M = {int(x):>8d}  ||zf||^2 = {s:.6f}")

    print("\nshifted g_k, is z^j g_k in F?  (rows k, columns j)")
    print("     " + "".join(f"{j:>12d}" for j in range(5)))
    for k in range(5):
        row = [shifted_g(k, j, 1.0).verdict.value for j in range(5)]
        print(f"{k:>5d}" + "".join(f"{v:>12}" for v in row))


if __name__ == "__main__":
    main()
