"""Compare born, full-pipeline and oracle counts across a corpus.

    python scripts/certify_sweep.py --overrides 2,1 4,1 8,2
"""

import argparse

from sumquot.cli import generate_corpus
from sumquot.oracle import quotient_size
from sumquot.pipeline import certify_born, certify_full
from sumquot.ratcore import RatSet


def corpus():
    yield "ap16", generate_corpus("ap", 16)
    yield "ap32", generate_corpus("ap", 32)
    yield "gp24", generate_corpus("gp", 24)
    yield "gp40", generate_corpus("gp", 40)
    yield "smooth36", RatSet(2 ** i * 3 ** j for i in range(6) for j in range(6))
    yield "rand24", generate_corpus("random", 24, seed=1, range=200)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--overrides", nargs="+", default=["2,1", "4,1", "8,2", "16,2"])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    pairs = [tuple(int(v) for v in o.split(",")) for o in args.overrides]

    print(f"{'set':>9} {'n':>3} {'tau':>4} {'M,N':>6} {'mode':>14} {'born':>6} {'pipe':>6} {'oracle':>7} {'err':>5}")
    for name, A in corpus():
        born, Q = certify_born(A).count, quotient_size(A)
        for M, N in pairs:
            out = certify_full(A, M=M, N=N, seed=args.seed)
            err = sum(c.error_sum for c in out.per_cluster)
            print(f"{name:>9} {len(A):>3} {out.selection.tau:>4} {f'{M},{N}':>6} {out.mode:>14} "
                  f"{born:>6} {out.count:>6} {Q:>7} {err:>5}")


if __name__ == "__main__":
    main()
