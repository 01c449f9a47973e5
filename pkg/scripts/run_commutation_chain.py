"""Run the kernel-commutation checks for a handful of symbols and print a table.

    python3 scripts/run_commutation_chain.py --N 64 --r 1.0
"""

import argparse

from bargmann import parse_symbol
from bargmann.operators import annihilation_matrix
from bargmann.verify import (
    DEFAULT_K_GRID, check_thm4_a, check_thm4_b, check_thm4_d, check_thm4_f,
)

SYMBOLS = ["poly:0,1", "poly:0,0,1", "poly:1,0,0,1", "exp:0.2,0,0", "kernel:0.5i"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--N", type=int, default=64)
    ap.add_argument("--r", type=float, default=1.0)
    ap.add_argument("--tol", type=float, default=1e-8)
    args = ap.parse_args()
    N, r, tol, grid = args.N, args.r, args.tol, list(DEFAULT_K_GRID)
    Ns = [N // 4, N // 2, N]

    print(f"{'symbol':<16}{'thm4a':>11}{'thm4b':>11}{'thm4d':>11}{'thm4f':>11}  pass")
    for spec in SYMBOLS:
        phi = parse_symbol(spec, r)
        reps = [check_thm4_a(phi, grid, grid, N, r, tol), check_thm4_b(phi, grid, N, r, tol),
                check_thm4_d(phi, grid, Ns, r, tol), check_thm4_f(phi, grid, N, r, tol)]
        cells = "".join(f"{rep.max_residual:>11.2e}" for rep in reps)
        print(f"{spec:<16}{cells}  {all(rep.passed for rep in reps)}")

    # the annihilation operator is not a multiplication operator
    am = annihilation_matrix(N, r)
    reps = [check_thm4_a(am, grid, grid, N, r, tol), check_thm4_b(am, grid, N, r, tol)]
    print(f"{'annihilation':<16}" + "".join(f"{rep.max_residual:>11.2e}" for rep in reps)
          + f"{'-':>11}{check_thm4_f(am, grid, N, r, tol).max_residual:>11.2e}  (control)")


if __name__ == "__main__":
    main()
