"""Exact rationals, finite-set algebra and the slope decomposition of A x A.

The scalar type is :class:`fractions.Fraction`, which already keeps a
canonical reduced form with a positive denominator.  Points in the plane are
plain ``(x, y)`` tuples of fractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, Iterator, List, Tuple

from sumquot.errors import InputError

Point = Tuple[Fraction, Fraction]


def make_rational(num, den=1) -> Fraction:
    if den == 0:
        raise InputError("zero denominator")
    return Fraction(num, den)


def as_rational(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ZeroDivisionError:
            raise InputError(f"zero denominator in {value!r}") from None
        except ValueError:
            raise InputError(f"not a rational: {value!r}") from None
    raise InputError(f"cannot use {type(value).__name__} as an exact rational")


class RatSet:
    """Immutable finite set of rationals with ascending iteration order.

    Membership is hashed.  The sorted view is built on first ordered access,
    because oracle-sized sets (hundreds of thousands of elements) are mostly
    used for ``len`` and ``in`` and sorting Fractions is comparatively slow.
    """

    __slots__ = ("_members", "_sorted")

    def __init__(self, elements: Iterable = ()):
        self._members = frozenset(as_rational(e) for e in elements)
        self._sorted = None

    @classmethod
    def _from_fractions(cls, members) -> "RatSet":
        obj = cls.__new__(cls)
        obj._members = frozenset(members)
        obj._sorted = None
        return obj

    @property
    def elements(self) -> Tuple[Fraction, ...]:
        if self._sorted is None:
            self._sorted = tuple(sorted(self._members))
        return self._sorted

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self._members)

    def __contains__(self, item) -> bool:
        return item in self._members

    def __getitem__(self, idx):
        return self.elements[idx]

    def __eq__(self, other) -> bool:
        if isinstance(other, RatSet):
            return self._members == other._members
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._members)

    def __le__(self, other: "RatSet") -> bool:
        return self._members <= other._members

    def __or__(self, other: "RatSet") -> "RatSet":
        return RatSet._from_fractions(self._members | other._members)

    def __and__(self, other: "RatSet") -> "RatSet":
        return RatSet._from_fractions(self._members & other._members)

    def isdisjoint(self, other: "RatSet") -> bool:
        return self._members.isdisjoint(other._members)

    def as_frozenset(self) -> frozenset:
        return self._members

    def min(self) -> Fraction:
        return min(self._members)

    def max(self) -> Fraction:
        return max(self._members)

    def __repr__(self) -> str:
        if len(self) > 12:
            head = ", ".join(str(e) for e in self.elements[:6])
            return f"RatSet([{head}, ...] n={len(self)})"
        return "RatSet([" + ", ".join(str(e) for e in self.elements) + "])"


def sumset(A: RatSet, B: RatSet) -> RatSet:
    return RatSet._from_fractions(a + b for a in A.as_frozenset() for b in B.as_frozenset())


def ratio_set(A: RatSet) -> RatSet:
    members = A.as_frozenset()
    return RatSet._from_fractions(a / b for a in members for b in members if b != 0)


def integer_scale(A: RatSet) -> Tuple[List[int], int]:
    """Return (integers, D) with ``A = {k / D : k in integers}``, sorted."""
    D = 1
    for a in A.as_frozenset():
        D = D * a.denominator // gcd(D, a.denominator)
    return [int(a * D) for a in A.elements], D


@dataclass(frozen=True)
class SlopeDecomposition:
    """Partition of A x A by lines through the origin.

    ``lines`` maps each slope to the x-coordinates of the grid points on that
    line; keys are inserted in ascending slope order.
    """

    lines: Dict[Fraction, RatSet]
    n: int
    _slopes: Tuple[Fraction, ...] = field(repr=False, compare=False, default=())

    @property
    def slopes(self) -> Tuple[Fraction, ...]:
        return self._slopes

    def multiplicity(self, lam: Fraction) -> int:
        return len(self.lines[lam])

    def points(self, lam: Fraction) -> List[Point]:
        """Grid points on the line of slope ``lam``, nearest the origin first."""
        return [(x, lam * x) for x in self.lines[lam].elements]


def slope_decomposition(A: RatSet) -> SlopeDecomposition:
    if 0 in A:
        raise InputError("0 in A: slopes y/x are undefined")
    buckets: Dict[Fraction, list] = {}
    for x in A.elements:
        for y in A.elements:
            buckets.setdefault(y / x, []).append(x)
    slopes = tuple(sorted(buckets))
    lines = {lam: RatSet._from_fractions(buckets[lam]) for lam in slopes}
    return SlopeDecomposition(lines=lines, n=len(A), _slopes=slopes)


def slope(p: Point) -> Fraction:
    if p[0] == 0:
        raise InputError(f"slope undefined for point with x = 0: {p}")
    return p[1] / p[0]


def slope_of_sum(p: Point, q: Point) -> Fraction:
    """R(p + q), the slope of the vector sum seen from the origin."""
    sx = p[0] + q[0]
    if sx == 0:
        raise InputError("sum has zero first coordinate; slope undefined")
    return (p[1] + q[1]) / sx


def iroot(value: int, k: int) -> int:
    """Largest integer r >= 0 with r**k <= value."""
    if value < 0 or k < 1:
        raise InputError("iroot needs value >= 0 and k >= 1")
    if value < 2:
        return value
    lo, hi = 1, 1 << (value.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid ** k <= value:
            lo = mid
        else:
            hi = mid - 1
    return lo


def floor_scaled_root(c: Fraction, value: int, k: int) -> int:
    """Exact floor(c * value**(1/k)) for rational c >= 0 and integer value >= 0."""
    c = Fraction(c)
    if c < 0:
        raise InputError("scale constant must be nonnegative")
    # floor(p/q * v^(1/k)) == floor(iroot(p^k v) / q)
    return iroot(c.numerator ** k * value, k) // c.denominator
