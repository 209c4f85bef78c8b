#!/usr/bin/env python3
"""Exploratory probe: faces containing k affinely independent stationary points.

The open question is whether such a face must be stationary throughout.  This
script runs the probe on random second-order tensors that are made stationary
at k chosen face points and reports what it sees.  It gathers evidence only.
"""

import argparse
import itertools

import numpy as np

from homc.analysis import conjecture_probe
from homc.constructions import ConstructionSpec, build_construction
from homc.errors import InvalidSpecError
from homc.tensor_core import TransitionTensor


def planted(n, k, rng):
    """Random tensor with e_1..e_k stationary: column (i, i) is e_i for i <= k."""
    E = rng.dirichlet(np.ones(n), size=n * n).T
    for i in range(k):
        E[:, i * n + i] = 0
        E[i, i * n + i] = 1
    return TransitionTensor(n, 2, E)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tensors", type=int, default=50)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    print("library constructions")
    for n, k in itertools.product(range(3, 6), range(3, 6)):
        if k > n:
            continue
        for variant in ("face", "disconnected", "k_points"):
            try:
                P = build_construction(ConstructionSpec(n, 2, k, variant), "float")
            except InvalidSpecError:
                continue
            r = conjecture_probe(P, range(1, k + 1), trials=args.trials, seed=args.seed)
            print(f"  {variant:13} n={n} k={k}: interior stationary points {len(r.interior_points)}, "
                  f"independent {r.affinely_independent}, face fully stationary {r.face_fully_stationary}")

    print("random tensors with planted stationary vertices")
    tally = {}
    for t in range(args.tensors):
        n = int(rng.integers(3, 6))
        k = int(rng.integers(3, n + 1))
        r = conjecture_probe(planted(n, k, rng), range(1, k + 1), trials=args.trials, seed=t)
        key = (r.affinely_independent, r.face_fully_stationary)
        tally[key] = tally.get(key, 0) + 1
    for (indep, full), count in sorted(tally.items(), key=str):
        print(f"  independent={indep} fully_stationary={full}: {count}")


if __name__ == "__main__":
    main()
