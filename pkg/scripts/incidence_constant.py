"""Empirical constant for the rich-curve incidence bound.

For each family we report the largest |L_k| / (|P|^2/k^3 + |P|/k) over k >= 2.
Families come from pipeline clusters (L) and from seeded random L' draws.
"""

import argparse
from fractions import Fraction

from sumquot.cli import generate_corpus, lprime_instances
from sumquot.curves import count_on_curve, ps_ratio
from sumquot.pipeline import incidence_instances
from sumquot.ratcore import RatSet


def best_ratio(family, grid):
    top = max((count_on_curve(c, grid) for c in family), default=0)
    best, at = Fraction(0), None
    for k in range(2, top + 1):
        r = ps_ratio(family, grid, k)
        if r > best:
            best, at = r, k
    return best, at


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--M", type=int, default=8)
    ap.add_argument("--N", type=int, default=2)
    ap.add_argument("--instances", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    sets = (
        (f"ap{args.n}", generate_corpus("ap", args.n)),
        (f"gp{args.n}", generate_corpus("gp", args.n)),
        # 3-smooth numbers have many slope coincidences, hence rich curves
        ("smooth36", RatSet(2 ** i * 3 ** j for i in range(6) for j in range(6))),
    )
    for label, A in sets:
        worst, where = Fraction(0), None
        for j, pair, family, grid in incidence_instances(A, args.M, args.N):
            r, k = best_ratio(family, grid)
            if r > worst:
                worst, where = r, (j, k)
        print(f"L  {label}: max ratio {float(worst):.4f} (cluster, k) = {where}")

    worst, where = Fraction(0), None
    for i, (family, grid) in enumerate(lprime_instances(args.instances, args.seed)):
        r, k = best_ratio(family, grid)
        if r > worst:
            worst, where = r, (i, k)
    print(f"L' random x{args.instances}: max ratio {float(worst):.4f} (instance, k) = {where}")


if __name__ == "__main__":
    main()
