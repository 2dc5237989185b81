"""The two conic families used for the incidence bounds, with exact algebra.

Family L (one curve per grid point (a, lam*a)) for a fixed slope pair
(lam1, lam2)::

    (lam*a + lam1*x)(a + y) == (lam*a + lam2*y)(a + x)

Family L' (one curve per pair (a, b)) for fixed slopes lam1..lam4::

    (lam3*a + lam1*x)(b + y) == (lam4*b + lam2*y)(a + x)

A grid point (x, y) lies on a curve exactly when two shifted slopes
coincide, which is how the pipeline uses these families.

Intersections are computed by the elimination route (y first, then x from
the linear relation); roots that are irrational are kept as
:class:`QuadraticRoot` markers so cardinality checks stay exact.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import isqrt
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from sumquot.errors import InputError, InvariantViolation
from sumquot.ratcore import Point, RatSet


@dataclass(frozen=True)
class CurveL:
    a: Fraction
    lam: Fraction
    lam1: Fraction
    lam2: Fraction

    def __post_init__(self):
        for name in ("a", "lam", "lam1", "lam2"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.lam1 == self.lam2:
            raise InputError("family L needs lam1 != lam2")
        if self.a <= 0:
            raise InputError("family L needs a > 0")
        # lam == lam1 makes the whole x-axis part of the curve; lam == lam2
        # splits it into two lines.  Neither arises in the pipeline.
        if self.lam in (self.lam1, self.lam2):
            raise InputError("family L needs lam distinct from lam1 and lam2")

    @property
    def lams(self) -> Tuple[Fraction, Fraction]:
        return (self.lam1, self.lam2)


@dataclass(frozen=True)
class CurveLPrime:
    a: Fraction
    b: Fraction
    lam1: Fraction
    lam2: Fraction
    lam3: Fraction
    lam4: Fraction

    def __post_init__(self):
        for name in ("a", "b", "lam1", "lam2", "lam3", "lam4"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.lam3 == self.lam4:
            raise InputError("family L' needs lam3 != lam4")
        if self.a <= 0 or self.b <= 0:
            raise InputError("family L' needs a > 0 and b > 0")
        # the two-point bound needs lam1 != lam3 and lam2 != lam4 (and
        # lam1 != lam4 for the constant coefficient); in the pipeline lam1,
        # lam2 come from U_j and lam3, lam4 from T_j'', which are disjoint
        if {self.lam1, self.lam2} & {self.lam3, self.lam4}:
            raise InputError("family L' needs {lam1, lam2} disjoint from {lam3, lam4}")

    @property
    def lams(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.lam1, self.lam2, self.lam3, self.lam4)


Curve = Union[CurveL, CurveLPrime]


@dataclass(frozen=True)
class PointGrid:
    xs: RatSet
    ys: RatSet

    def __post_init__(self):
        if not isinstance(self.xs, RatSet):
            object.__setattr__(self, "xs", RatSet(self.xs))
        if not isinstance(self.ys, RatSet):
            object.__setattr__(self, "ys", RatSet(self.ys))
        if any(v <= 0 for v in self.xs) or any(v <= 0 for v in self.ys):
            raise InputError("grid coordinates must be strictly positive")

    def __len__(self) -> int:
        return len(self.xs) * len(self.ys)

    def __iter__(self):
        for x in self.xs:
            for y in self.ys:
                yield (x, y)


@dataclass(frozen=True)
class QuadraticRoot:
    """Irrational root (-b1 + sign*sqrt(disc)) / (2*b2) of b2*y^2 + b1*y + b0."""

    b2: Fraction
    b1: Fraction
    b0: Fraction
    sign: int

    @property
    def disc(self) -> Fraction:
        return self.b1 * self.b1 - 4 * self.b2 * self.b0

    def approx(self) -> float:
        return (-float(self.b1) + self.sign * float(self.disc) ** 0.5) / (2 * float(self.b2))


def _on_l(a, lam, lam1, lam2, x, y) -> bool:
    return (lam * a + lam1 * x) * (a + y) == (lam * a + lam2 * y) * (a + x)


def _on_lprime(a, b, lam1, lam2, lam3, lam4, x, y) -> bool:
    return (lam3 * a + lam1 * x) * (b + y) == (lam4 * b + lam2 * y) * (a + x)


def membership_L(c: CurveL, x, y) -> bool:
    return _on_l(c.a, c.lam, c.lam1, c.lam2, x, y)


def membership_Lprime(c: CurveLPrime, x, y) -> bool:
    return _on_lprime(c.a, c.b, c.lam1, c.lam2, c.lam3, c.lam4, x, y)


def membership(c: Curve, x, y) -> bool:
    if isinstance(c, CurveL):
        return membership_L(c, x, y)
    return membership_Lprime(c, x, y)


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    rn, rd = isqrt(q.numerator), isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def solve_quadratic(b2, b1, b0) -> Optional[list]:
    """Real roots of b2*y^2 + b1*y + b0 (exact).

    Rational roots come back as Fractions, irrational ones as
    QuadraticRoot markers.  Returns None when every coefficient vanishes.
    """
    b2, b1, b0 = Fraction(b2), Fraction(b1), Fraction(b0)
    if b2 == 0:
        if b1 == 0:
            return None if b0 == 0 else []
        return [-b0 / b1]
    disc = b1 * b1 - 4 * b2 * b0
    if disc < 0:
        return []
    if disc == 0:
        return [-b1 / (2 * b2)]
    root = _rational_sqrt(disc)
    if root is None:
        return [QuadraticRoot(b2, b1, b0, -1), QuadraticRoot(b2, b1, b0, 1)]
    return sorted({(-b1 - root) / (2 * b2), (-b1 + root) / (2 * b2)})


def intersect_L(c1: CurveL, c2: CurveL) -> list:
    """Common points of two distinct curves of family L (at most two).

    Both curves pass through the origin; the other candidate comes from the
    linear factor of the quadratic in y.
    """
    if c1 == c2:
        raise InputError("intersect_L needs distinct curves")
    if c1.lams != c2.lams:
        raise InputError("curves must share (lam1, lam2)")
    a, lam, b, lamp = c1.a, c1.lam, c2.a, c2.lam
    l1, l2 = c1.lam1, c1.lam2

    # (l1 - l2) * y * (y*(a(l2-lam) - b(l2-lamp)) + ab(lamp-lam)) == 0
    ys = [Fraction(0)]
    lin = a * (l2 - lam) - b * (l2 - lamp)
    const = a * b * (lamp - lam)
    if lin == 0:
        if const == 0:
            # forces lam == lamp and then a == b
            raise InvariantViolation(f"degenerate linear factor for distinct curves {c1}, {c2}")
    else:
        y = -const / lin
        if y != 0:
            ys.append(y)

    points = []
    for y in ys:
        d1 = y * (l1 - l2) + a * (l1 - lam)
        d2 = y * (l1 - l2) + b * (l1 - lamp)
        if d1 == 0 or d2 == 0:
            # on the excluded horizontal line the curve is empty: its
            # equation reduces to a^2 (lam - l1)(l2 - lam)/(l1 - l2) == 0
            aa, ll = (a, lam) if d1 == 0 else (b, lamp)
            if aa * y * (l2 - ll) == 0:
                raise InvariantViolation("curve meets its excluded line")
            continue
        x = a * y * (l2 - lam) / d1
        if not (membership_L(c1, x, y) and membership_L(c2, x, y)):
            raise InvariantViolation(f"intersection candidate ({x}, {y}) fails membership")
        points.append((x, y))
    if len(points) > 2:
        raise InvariantViolation("more than two intersection points")
    return points


def _lprime_parts(c: CurveLPrime):
    # x * (p1*y + p0) == q1*y + q0
    l1, l2, l3, l4 = c.lams
    p1, p0 = l1 - l2, c.b * (l1 - l4)
    q1, q0 = c.a * (l2 - l3), c.a * c.b * (l4 - l3)
    return p1, p0, q1, q0


def intersect_Lprime(c1: CurveLPrime, c2: CurveLPrime) -> list:
    """Common points of two distinct curves of family L'.

    Returns at most two entries: rational points ``(x, y)`` and, for
    irrational y, ``(None, QuadraticRoot)`` markers which can never be grid
    incidences.
    """
    if c1 == c2:
        raise InputError("intersect_Lprime needs distinct curves")
    if c1.lams != c2.lams:
        raise InputError("curves must share (lam1, lam2, lam3, lam4)")
    p1, p0, q1, q0 = _lprime_parts(c1)
    r1, r0, s1, s0 = _lprime_parts(c2)
    # (q1 y + q0)(r1 y + r0) - (s1 y + s0)(p1 y + p0) == 0
    b2 = q1 * r1 - s1 * p1
    b1 = q1 * r0 + q0 * r1 - s1 * p0 - s0 * p1
    b0 = q0 * r0 - s0 * p0
    roots = solve_quadratic(b2, b1, b0)
    if roots is None:
        # vanishing coefficients force a == a' and then b == b'
        raise InvariantViolation(f"all quadratic coefficients vanish for {c1}, {c2}")

    out = []
    for y in roots:
        if isinstance(y, QuadraticRoot):
            # P(y) has a rational root, so it cannot vanish here
            out.append((None, y))
            continue
        d1, d2 = p1 * y + p0, r1 * y + r0
        if d1 == 0 or d2 == 0:
            # on the line where the x-coefficient vanishes the curve has no
            # point unless (lam3 - lam1)(lam2 - lam4) == 0
            q = (q1 * y + q0) if d1 == 0 else (s1 * y + s0)
            if q == 0:
                raise InvariantViolation("curve meets its excluded line")
            continue
        x = (q1 * y + q0) / d1
        if not (membership_Lprime(c1, x, y) and membership_Lprime(c2, x, y)):
            raise InvariantViolation(f"intersection candidate ({x}, {y}) fails membership")
        out.append((x, y))
    if len(out) > 2:
        raise InvariantViolation("more than two intersection points")
    return out


def curves_through_pair_Lprime(p: Point, q: Point, lams: Sequence) -> list:
    """Parameters (a, b) of every L' curve through both p and q.

    Rational solutions are ``(a, b)`` Fraction pairs; irrational b values
    come back as ``(None, QuadraticRoot)``.  At most two entries.
    """
    x0, y0 = Fraction(p[0]), Fraction(p[1])
    x1, y1 = Fraction(q[0]), Fraction(q[1])
    if (x0, y0) == (x1, y1):
        raise InputError("curves_through_pair_Lprime needs p != q")
    if min(x0, y0, x1, y1) <= 0:
        raise InputError("points must have positive coordinates")
    l1, l2, l3, l4 = (Fraction(v) for v in lams)
    if l3 == l4 or {l1, l2} & {l3, l4}:
        raise InputError("need lam3 != lam4 and {lam1, lam2} disjoint from {lam3, lam4}")

    # a * (g1*b + g0) == h1*b + h0 for each point
    def parts(x, y):
        return (l3 - l4), y * (l3 - l2), x * (l4 - l1), x * y * (l2 - l1)

    g1, g0, h1, h0 = parts(x0, y0)
    k1, k0, m1, m0 = parts(x1, y1)
    # (h1 b + h0)(k1 b + k0) - (m1 b + m0)(g1 b + g0) == 0
    b2 = h1 * k1 - m1 * g1
    b1 = h1 * k0 + h0 * k1 - m1 * g0 - m0 * g1
    b0 = h0 * k0 - m0 * g0
    roots = solve_quadratic(b2, b1, b0)
    if roots is None:
        # x0 == x1 plus a vanishing linear term forces y0 == y1
        raise InvariantViolation(f"all coefficients vanish for distinct points {p}, {q}")

    out = []
    for b in roots:
        if isinstance(b, QuadraticRoot):
            out.append((None, b))
            continue
        e0, e1 = g1 * b + g0, k1 * b + k0
        if e0 == 0 or e1 == 0:
            # no a can work here unless (lam1 - lam3)(lam4 - lam2) == 0
            rhs = (h1 * b + h0) if e0 == 0 else (m1 * b + m0)
            if rhs == 0:
                raise InvariantViolation("degenerate b branch admits a solution")
            continue
        a = (h1 * b + h0) / e0
        if not (_on_lprime(a, b, l1, l2, l3, l4, x0, y0) and _on_lprime(a, b, l1, l2, l3, l4, x1, y1)):
            raise InvariantViolation(f"parameters ({a}, {b}) fail membership")
        out.append((a, b))
    if len(out) > 2:
        raise InvariantViolation("more than two curves through a point pair")
    return out


def points_on_curve(c: Curve, grid: PointGrid) -> List[Point]:
    """Grid points on ``c``, found by solving the (linear) equation in y per x."""
    ys = grid.ys.as_frozenset()
    found = []
    for x in grid.xs:
        if isinstance(c, CurveL):
            coef = c.lam * c.a + c.lam1 * x - c.lam2 * (c.a + x)
            rhs = c.a * x * (c.lam - c.lam1)
        else:
            coef = c.lam3 * c.a + c.lam1 * x - c.lam2 * (c.a + x)
            rhs = c.lam4 * c.b * (c.a + x) - c.b * (c.lam3 * c.a + c.lam1 * x)
        if coef == 0:
            if rhs == 0:
                found.extend((x, y) for y in grid.ys)
            continue
        y = rhs / coef
        if y in ys:
            found.append((x, y))
    return found


def count_on_curve(c: Curve, grid: PointGrid) -> int:
    return len(points_on_curve(c, grid))


def rich_curves(family: Iterable[Curve], grid: PointGrid, k: int) -> list:
    if k < 2:
        raise InputError("rich_curves needs k >= 2")
    return [c for c in family if count_on_curve(c, grid) >= k]


def ps_ratio(family: Sequence[Curve], grid: PointGrid, k: int) -> Fraction:
    """|L_k| / (|P|^2/k^3 + |P|/k): the constant the incidence bound would need."""
    P = len(grid)
    if P == 0:
        return Fraction(0)
    denom = Fraction(P * P, k ** 3) + Fraction(P, k)
    return Fraction(len(rich_curves(family, grid, k))) / denom


@dataclass
class PSReport:
    family: str
    bound: int
    curves: int
    grid_points: int
    max_curve_pair: int
    max_point_pair: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_ps_conditions(family: Sequence[Curve], grid: PointGrid) -> PSReport:
    """Exhaustively check both incidence preconditions on a grid.

    Curve pairs may share at most ``bound`` grid points and point pairs may
    lie on at most ``bound`` common curves, where bound is 1 for family L
    (all its curves also share the origin) and 2 for L'.
    """
    family = list(family)
    if len(set(family)) != len(family):
        raise InputError("family contains duplicate curves")
    kinds = {type(c) for c in family}
    if len(kinds) > 1:
        raise InputError("family mixes L and L' curves")
    if len({c.lams for c in family}) > 1:
        raise InputError("family members must share their fixed slopes")
    is_l = not family or isinstance(family[0], CurveL)
    bound = 1 if is_l else 2

    on = [frozenset(points_on_curve(c, grid)) for c in family]
    violations = []
    max_cp = 0
    for i, j in combinations(range(len(family)), 2):
        shared = on[i] & on[j]
        max_cp = max(max_cp, len(shared))
        if len(shared) > bound:
            violations.append(("curve-pair", family[i], family[j], sorted(shared)))

    per_pair = Counter()
    for pts in on:
        for pq in combinations(sorted(pts), 2):
            per_pair[pq] += 1
    max_pp = max(per_pair.values(), default=0)
    for pq, cnt in sorted(per_pair.items()):
        if cnt > bound:
            violations.append(("point-pair", pq, cnt))

    return PSReport(
        family="L" if is_l else "L'",
        bound=bound,
        curves=len(family),
        grid_points=len(grid),
        max_curve_pair=max_cp,
        max_point_pair=max_pp,
        violations=violations,
    )
