#!/usr/bin/env python3
"""Compare grid-enumerated stationary sets of order-2 and order-3 recipes."""

import argparse
import time

import numpy as np

from homc.constructions import VARIANTS, ConstructionSpec, build_construction
from homc.errors import InvalidSpecError
from homc.solvers import enumerate_stationary_grid


def same(A, B, tol):
    if len(A) != len(B):
        return False
    return all(any(np.abs(a - b).max() <= tol for b in B) for a in A)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--resolution", type=int, default=40)
    ap.add_argument("--tol", type=float, default=1e-8)
    args = ap.parse_args()
    print(f"{'variant':18} {'n':>2} {'k':>2} {'m=2':>6} {'m=3':>6}  equal  time")
    for n in range(1, args.max_n + 1):
        for k in range(1, n + 1):
            for v in VARIANTS:
                try:
                    specs = [ConstructionSpec(n, m, k, v) for m in (2, 3)]
                except InvalidSpecError:
                    continue
                t0 = time.perf_counter()
                A, B = (enumerate_stationary_grid(build_construction(s, "float"), args.resolution) for s in specs)
                print(f"{v:18} {n:2d} {k:2d} {len(A):6d} {len(B):6d}  {str(same(A, B, args.tol)):5}  "
                      f"{time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
