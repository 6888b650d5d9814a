"""Free-fermion formulas against exact diagonalization on small rings."""

import argparse
import cmath
import math
import sys

from nhxy.cli import oracle_comparison
from nhxy.model import ModelParams

FIELDS = [cmath.rect(0.5, math.pi / 3), cmath.rect(1.5, math.pi / 3), cmath.rect(3.0, math.pi / 3),
          0.5 + 0j, 1.5 + 0j]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[6, 8, 10])
    ap.add_argument("--gammas", type=float, nargs="+", default=[0.5, 1.0])
    ap.add_argument("--tol", type=float, default=1e-8)
    args = ap.parse_args()
    worst = 0.0
    for n in args.sizes:
        for g in args.gammas:
            for lam in FIELDS:
                rows = oracle_comparison(ModelParams(g, lam, n), n // 2 - 1, min(3, n // 2))
                diff = max(abs(e - f) for _, _, e, f in rows)
                worst = max(worst, diff)
                print(f"N={n:2d} gamma={g:.2f} lam={lam.real:+.3f}{lam.imag:+.3f}i  max|diff|={diff:.2e}")
    print(f"worst {worst:.2e} (tolerance {args.tol:g})")
    sys.exit(0 if worst <= args.tol else 2)


if __name__ == "__main__":
    main()
