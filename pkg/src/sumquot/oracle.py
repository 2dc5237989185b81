"""Brute-force ground truth for the quotient set (A+A)/(A+A)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from sumquot.errors import InputError
from sumquot.ratcore import RatSet, integer_scale, iroot, ratio_set

# digits kept when the main1 ratio is rendered
MAIN1_DIGITS = 6
_ROOT_DIGITS = 15


def _quotient_pairs(A: RatSet) -> set:
    """Reduced (num, den) pairs of every (a+b)/(c+d) with c+d != 0.

    Elements are scaled to integers first; the quotient set is invariant
    under scaling A, so the ratios of integer sums are the answer.
    """
    ints, _ = integer_scale(A)
    sums = {a + b for a in ints for b in ints}
    out = set()
    for t in sums:
        if t == 0:
            continue
        sign = -1 if t < 0 else 1
        at = abs(t)
        for s in sums:
            g = gcd(s, at)
            out.add((sign * s // g, at // g))
    return out


def quotient_of_sums_exact(A: RatSet) -> RatSet:
    return RatSet._from_fractions(Fraction(p, q) for p, q in _quotient_pairs(A))


def quotient_size(A: RatSet) -> int:
    return len(_quotient_pairs(A))


def ceil_log2(n: int) -> int:
    return max(0, (n - 1).bit_length())


def main1_ratio(quotient_size: int, ratio_set_size: int, n: int) -> str:
    """quotient_size * |A:A|^(1/25) * log|A| / n^(2+2/25), as a decimal string.

    log|A| is taken as ceil(log2 n).  The 25th root of |A:A| / n^52 is
    extracted with integer arithmetic at ``_ROOT_DIGITS`` fractional digits,
    so the printed value is accurate to well below ``10**-MAIN1_DIGITS``.
    """
    scale = 10 ** _ROOT_DIGITS
    root = iroot(ratio_set_size * scale ** 25 // n ** 52, 25)
    value = Fraction(quotient_size * ceil_log2(n) * root, scale)
    q = round(value * 10 ** MAIN1_DIGITS)
    whole, frac = divmod(q, 10 ** MAIN1_DIGITS)
    return f"{whole}.{frac:0{MAIN1_DIGITS}d}"


@dataclass(frozen=True)
class QuotientReport:
    n: int
    quotient_size: int
    ratio_set_size: int
    antal_lhs_ok: bool
    main1_ratio: str


def bound_report(A: RatSet) -> QuotientReport:
    if len(A) == 0:
        raise InputError("A must be nonempty")
    if any(a <= 0 for a in A.as_frozenset()):
        raise InputError("A must consist of strictly positive rationals")
    n = len(A)
    q = quotient_size(A)
    r = len(ratio_set(A))
    return QuotientReport(
        n=n,
        quotient_size=q,
        ratio_set_size=r,
        antal_lhs_ok=q >= 2 * n * n - 1,
        main1_ratio=main1_ratio(q, r, n),
    )


def missing_witnesses(A: RatSet, witnesses) -> list:
    """Witness slopes that are NOT of the form (a+b)/(c+d); empty when sound."""
    pairs = _quotient_pairs(A)
    bad = []
    for w in witnesses:
        w = Fraction(w)
        if (w.numerator, w.denominator) not in pairs:
            bad.append(w)
    return bad
