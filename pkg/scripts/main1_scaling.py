"""Tabulate |(A+A)/(A+A)|, |A:A| and the normalised main1 ratio.

The ratio Q |A:A|^(1/25) log|A| / n^(2+2/25) should stay bounded below if the
lower bound holds with some constant; at these sizes it only shows trends.

    python scripts/main1_scaling.py --sizes 8 16 24 32 --seeds 3
"""

import argparse

from sumquot.cli import generate_corpus
from sumquot.oracle import bound_report


def families(n, seeds):
    yield "ap", generate_corpus("ap", n)
    yield "gp2", generate_corpus("gp", n, ratio=2)
    yield "gp3/2", generate_corpus("gp", n, ratio="3/2")
    for s in range(seeds):
        yield f"rand{s}", generate_corpus("random", n, seed=s, range=10 * n)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 16, 24, 32])
    ap.add_argument("--seeds", type=int, default=2)
    args = ap.parse_args()

    print(f"{'family':>8} {'n':>4} {'|Q|':>8} {'2n^2-1':>8} {'|A:A|':>7} {'main1':>10}")
    for n in args.sizes:
        for name, A in families(n, args.seeds):
            rep = bound_report(A)
            print(f"{name:>8} {n:>4} {rep.quotient_size:>8} {2 * n * n - 1:>8} "
                  f"{rep.ratio_set_size:>7} {rep.main1_ratio:>10}")


if __name__ == "__main__":
    main()
