"""Bracket the pair density that forces a transversal clique.

Lower side: the tightness construction keeps k^2(1 - 1/(r-1)) edges per pair
and has no clique.  Upper side: the sufficient threshold k^2(1 - 1/(e(2r-3))).
A random search additionally looks for clique-free graphs with large minimum
pair density, which can only raise the lower side.
"""

import argparse
import random
from itertools import combinations

from sumquot.egtgraph import (
    E_UPPER,
    MultipartiteGraph,
    backtrack_transversal_clique,
    densities,
    egt_threshold,
    tightness_construction,
)


def random_search(r, k, trials, rng):
    best = -1
    for _ in range(trials):
        keep = rng.uniform(0.5, 1.0)
        edges = [((i, s), (j, t)) for i, j in combinations(range(r), 2)
                 for s in range(k) for t in range(k) if rng.random() < keep]
        g = MultipartiteGraph(r, k, edges)
        low = min(densities(g).values())
        if low > best and backtrack_transversal_clique(g) is None:
            best = low
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)

    print(f"{'r':>2} {'k':>2} {'k^2':>4} {'tight':>6} {'search':>7} {'sufficient':>11}")
    for r, k in ((3, 2), (3, 4), (4, 3), (4, 6), (5, 4), (5, 8)):
        tight = min(densities(tightness_construction(r, k)).values())
        found = random_search(r, k, args.trials, rng)
        found = "-" if found < 0 else found
        suff = float(egt_threshold(r, k, E_UPPER))
        print(f"{r:>2} {k:>2} {k * k:>4} {tight:>6} {found:>7} {suff:>11.3f}")


if __name__ == "__main__":
    main()
