#!/usr/bin/env python3
"""Similarity evaluations and wall time of k-RNG queries on synthetic points.

Prints one row per k: the scan cost (|V| - 1), the extra evaluations spent on
blocker checks, the k(k-1)/2 ceiling for those, and the mean time per query.
"""

import argparse
import time

import numpy as np

from rnghorizon.embeddings import EmbeddingModel
from rnghorizon.rng import krng_neighbors
from rnghorizon.similarity import CosineSpace, EuclideanSpace


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0],
                                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--dim", type=int, default=50)
    p.add_argument("--similarity", choices=["cosine", "euclidean"], default="cosine")
    p.add_argument("--k", type=int, nargs="+", default=[10, 30, 100, 300, 1000])
    p.add_argument("--queries", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    pts = rng.standard_normal((args.n, args.dim))
    if args.similarity == "cosine":
        space = CosineSpace(EmbeddingModel([f"w{i}" for i in range(args.n)], pts))
    else:
        space = EuclideanSpace(pts)
    queries = rng.choice(args.n, args.queries, replace=False)

    print(f"{'k':>6} {'scan':>8} {'extra(mean)':>12} {'extra(max)':>11} {'k(k-1)/2':>10} {'ms/query':>9} {'|nbrs|':>7}")
    for k in args.k:
        extras, sizes = [], []
        start = time.perf_counter()
        for a in queries:
            space.reset_counter()
            sizes.append(len(krng_neighbors(space, int(a), k)))
            extras.append(space.evaluations - (space.n_active - 1))
        ms = 1000 * (time.perf_counter() - start) / len(queries)
        print(f"{k:>6} {space.n_active - 1:>8} {np.mean(extras):>12.0f} {max(extras):>11} "
              f"{k * (k - 1) // 2:>10} {ms:>9.1f} {np.mean(sizes):>7.1f}")


if __name__ == "__main__":
    main()
