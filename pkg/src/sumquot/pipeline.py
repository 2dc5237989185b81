"""Certified witness sets of distinct slopes in (A+A)/(A+A).

Two certifiers live here:

* :func:`certify_born` sums a fixed point of each line with every point of
  the next steeper line.  Sums from neighbouring lines land strictly between
  them, so the n^2 - 1 resulting slopes are distinct.
* :func:`certify_full` runs the cluster machinery: dyadic selection of lines
  of similar richness, clusters of M+N consecutive slopes, a filter on
  points with too many slope coincidences, a good-pair graph whose
  transversal clique fixes one representative per line, and exact
  enumeration of the resulting slopes with per-cluster overcount accounting.

Every fractional power threshold is decided by integer powers, e.g.
r <= tau^(24/25) is tested as r**25 <= tau**24.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import ceil
from typing import Dict, List, Optional, Sequence, Tuple

from sumquot.curves import CurveL, CurveLPrime, PointGrid, count_on_curve
from sumquot.egtgraph import (
    E_LOWER,
    E_UPPER,
    MultipartiteGraph,
    backtrack_transversal_clique,
    sample_transversal_clique,
)
from sumquot.errors import InputError, InvariantViolation
from sumquot.oracle import ceil_log2
from sumquot.ratcore import (
    Point,
    RatSet,
    SlopeDecomposition,
    floor_scaled_root,
    slope_decomposition,
    slope_of_sum,
)

DEFAULT_C_M = Fraction(1, 2)
DEFAULT_C_N = Fraction(1, 16)
SAMPLER_TRIES = 2000

OK, VIOLATED, NOT_EVALUABLE = "ok", "violated", "not-evaluable"


def _check_positive(A: RatSet) -> None:
    if any(a <= 0 for a in A.as_frozenset()):
        raise InputError("A must consist of strictly positive rationals")


# -- dyadic selection ---------------------------------------------------------


@dataclass(frozen=True)
class PigeonholeSelection:
    tau: int
    S: RatSet
    bucket_index: int
    mass: int
    t0: Fraction
    bucket_masses: Tuple[int, ...] = ()


def dyadic_select(d: SlopeDecomposition) -> PigeonholeSelection:
    """Pick the dyadic richness band [2^(j-1) t0, 2^j t0) of largest mass.

    t0 = n^2 / (2 |A:A|).  Ties go to the smallest j, and tau is the least
    richness inside the chosen band, so tau <= |A_lam| < 2 tau holds exactly.
    """
    n = d.n
    if n < 2:
        raise InputError("dyadic_select needs |A| >= 2")
    t0 = Fraction(n * n, 2 * len(d.slopes))
    rich = max(d.multiplicity(lam) for lam in d.slopes)

    masses, members = [], []
    j = 1
    while True:
        lo, hi = t0 * 2 ** (j - 1), t0 * 2 ** j
        lams = [lam for lam in d.slopes if lo <= d.multiplicity(lam) < hi]
        masses.append(sum(d.multiplicity(lam) for lam in lams))
        members.append(lams)
        if hi > rich:
            break
        j += 1

    best = max(range(len(masses)), key=lambda i: (masses[i], -i))
    lams = members[best]
    tau = min(d.multiplicity(lam) for lam in lams)
    sel = PigeonholeSelection(
        tau=tau,
        S=RatSet._from_fractions(lams),
        bucket_index=best + 1,
        mass=masses[best],
        t0=t0,
        bucket_masses=tuple(masses),
    )
    if tau < t0 or 4 * tau * len(lams) * (ceil_log2(n) + 1) < n * n:
        raise InvariantViolation(f"pigeonhole bounds fail for {sel}")
    return sel


# -- parameters and regime ------------------------------------------------------


@dataclass(frozen=True)
class Condition:
    id: str
    status: str
    detail: str = ""


def _status(flag: Optional[bool]) -> str:
    if flag is None:
        return NOT_EVALUABLE
    return OK if flag else VIOLATED


def _e_le(coef: Fraction, bound: Fraction) -> Optional[bool]:
    """Decide e * coef <= bound for coef >= 0 using the enclosure of e."""
    if E_UPPER * coef <= bound:
        return True
    if E_LOWER * coef > bound:
        return False
    return None


def choose_parameters(
    tau: int,
    c_M: Fraction = DEFAULT_C_M,
    c_N: Fraction = DEFAULT_C_N,
    S_size: int = 0,
    C: Optional[Fraction] = None,
    C_prime: Optional[Fraction] = None,
    M_override: Optional[int] = None,
    N_override: Optional[int] = None,
) -> Tuple[int, int, List[Condition]]:
    """M = floor(c_M tau^(1/5)), N = floor(c_N tau^(1/25)) plus a regime report.

    Overrides replace the derived M, N; (req1) is judged on the values
    actually used.  Conditions needing the unquantified constants C, C' are
    reported as not evaluable unless those are supplied.
    """
    if tau < 1:
        raise InputError("tau must be >= 1")
    c_M, c_N = Fraction(c_M), Fraction(c_N)
    M = floor_scaled_root(c_M, tau, 5) if M_override is None else int(M_override)
    N = floor_scaled_root(c_N, tau, 25) if N_override is None else int(N_override)

    req1 = 1 <= N <= M and 2 * M <= S_size
    c3 = None if C_prime is None else _e_le(4 * Fraction(C_prime) * c_M * c_N ** 2, Fraction(1))
    c4 = None if C is None else c_N ** 2 <= c_M / (4 * Fraction(C))
    c5 = c_M ** 25 * tau ** 5 >= c_N ** 25 * tau
    c7 = c_N ** 25 * tau >= 1
    c8 = c_M ** 5 * tau * 32 <= Fraction(S_size) ** 5

    conds = [
        Condition("req1", _status(req1), f"1 <= N={N} <= M={M} <= |S|/2={Fraction(S_size, 2)}"),
        Condition("req2", _status(c4), "c_N <= (c_M/(4C))^(1/2)"),
        Condition("req3", _status(c3), "4 e C' c_M c_N^2 <= 1"),
        Condition("1", _status(c_M <= Fraction(1, 2)), f"c_M={c_M} <= 1/2"),
        Condition("2", _status(c_N <= Fraction(1, 16)), f"c_N={c_N} <= 1/16"),
        Condition("3", _status(c3), "4 e C' c_M c_N^2 <= 1"),
        Condition("4", _status(c4), "c_N <= (c_M/(4C))^(1/2)"),
        Condition("5", _status(c5), "c_M tau^(1/5) >= c_N tau^(1/25)"),
        Condition("7", _status(c7), "c_N tau^(1/25) >= 1"),
        Condition("8", _status(c8), "c_M tau^(1/5) <= |S|/2"),
    ]
    return M, N, conds


def regime_ok(conditions: Sequence[Condition]) -> bool:
    return all(c.status == OK for c in conditions)


# -- clusters -------------------------------------------------------------------


@dataclass(frozen=True)
class ClusterPlan:
    M: int
    N: int
    c_M: Fraction
    c_N: Fraction
    clusters: Tuple[Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]], ...]
    regime: Tuple[Condition, ...] = ()

    def band(self, j: int) -> Tuple[Fraction, Fraction]:
        T, U = self.clusters[j]
        return T[0], U[-1]


def build_clusters(
    sel: PigeonholeSelection,
    M: int,
    N: int,
    c_M: Fraction = DEFAULT_C_M,
    c_N: Fraction = DEFAULT_C_N,
    regime: Sequence[Condition] = (),
) -> ClusterPlan:
    if M < 1 or N < 1:
        raise InputError("build_clusters needs M >= 1 and N >= 1")
    slopes = sel.S.elements
    size = M + N
    if size > len(slopes):
        raise InputError(f"M+N={size} exceeds |S|={len(slopes)}")
    clusters = []
    for j in range(len(slopes) // size):
        chunk = slopes[j * size:(j + 1) * size]
        clusters.append((tuple(chunk[:M]), tuple(chunk[M:])))
    return ClusterPlan(M, N, Fraction(c_M), Fraction(c_N), tuple(clusters), tuple(regime))


# -- technical filter -------------------------------------------------------------


@dataclass
class TechnicalSubset:
    T: Tuple[Fraction, ...]
    U: Tuple[Fraction, ...]
    P: frozenset
    richness: Dict[Point, int]
    T_p: Tuple[Fraction, ...]
    T_pp: Tuple[Fraction, ...]
    lines_pp: Dict[Fraction, Tuple[Point, ...]]
    refinement_ok: bool
    measured_C: Optional[float] = None

    @property
    def points_pp(self) -> List[Point]:
        return [p for lam in self.T_pp for p in self.lines_pp[lam]]


def coincidence_count_L(point: Point, lam: Fraction, lam1: Fraction, lam2: Fraction, d: SlopeDecomposition) -> int:
    """#{(x, y) in A_lam1 x A_lam2 : R(p + (x, lam1 x)) == R(p + (y, lam2 y))}."""
    curve = CurveL(point[0], lam, lam1, lam2)
    return count_on_curve(curve, PointGrid(d.lines[lam1], d.lines[lam2]))


def technical_filter(cluster, d: SlopeDecomposition, tau: int) -> TechnicalSubset:
    """Keep points of the T-lines whose coincidence counts stay <= tau^(24/25)
    against every ordered distinct pair of U-slopes, then refine to the
    shallowest ceil(M/8) lines that keep >= ceil(tau/4) survivors."""
    T, U = tuple(cluster[0]), tuple(cluster[1])
    pairs = [(l1, l2) for l1 in U for l2 in U if l1 != l2]
    limit = tau ** 24
    survivors, richness = [], {}
    for lam in T:
        for p in d.points(lam):
            r = max((coincidence_count_L(p, lam, l1, l2, d) for l1, l2 in pairs), default=0)
            richness[p] = r
            if r ** 25 <= limit:
                survivors.append(p)
    P = frozenset(survivors)

    per_line = ceil(Fraction(tau, 4))
    need = ceil(Fraction(len(T), 8))
    T_p = tuple(lam for lam in T if sum(1 for p in d.points(lam) if p in P) >= per_line)
    T_pp = T_p[:need]
    lines_pp = {lam: tuple(p for p in d.points(lam) if p in P)[:per_line] for lam in T_pp}

    measured = None
    N = len(U)
    if N >= 2:
        measured = (tau * len(T) - len(P)) / (N * N * tau ** (28 / 25))
    return TechnicalSubset(T, U, P, richness, T_p, T_pp, lines_pp, len(T_p) >= need, measured)


# -- good-pair graph ---------------------------------------------------------------


def coincidence_count_Lprime(p: Point, q: Point, lam1, lam2, lam3, lam4, d: SlopeDecomposition) -> int:
    """#{(x, y) : R(p + (x, lam1 x)) == R(q + (y, lam2 y))} with p on lam3, q on lam4."""
    curve = CurveLPrime(p[0], q[0], lam1, lam2, lam3, lam4)
    return count_on_curve(curve, PointGrid(d.lines[lam1], d.lines[lam2]))


def build_good_pair_graph(ts: TechnicalSubset, U: Sequence[Fraction], tau: int, d: SlopeDecomposition) -> MultipartiteGraph:
    """Parts are the lines of T_j''; two points on different lines are joined
    when every (lam1, lam2) in U x U gives a coincidence count c with
    c^25 <= tau^19."""
    if not ts.refinement_ok:
        raise InputError("good-pair graph needs a successful refinement")
    lines = ts.T_pp
    k = len(ts.lines_pp[lines[0]]) if lines else 0
    labels = {(i, s): p for i, lam in enumerate(lines) for s, p in enumerate(ts.lines_pp[lam])}
    limit = tau ** 19
    pairs = list(product(U, U))

    def good(u, v) -> bool:
        p, q = labels[u], labels[v]
        l3, l4 = lines[u[0]], lines[v[0]]
        return all(coincidence_count_Lprime(p, q, l1, l2, l3, l4, d) ** 25 <= limit for l1, l2 in pairs)

    return MultipartiteGraph.from_predicate(len(lines), k, good, labels)


def select_representatives(g: MultipartiteGraph, seed: int = 0, max_tries: int = SAMPLER_TRIES):
    """One point per part: a transversal clique when one exists, otherwise
    the nearest-origin point of each line (tag ``fallback``)."""
    cert = sample_transversal_clique(g, seed, max_tries)
    if cert is None:
        cert = backtrack_transversal_clique(g)
    if cert is not None:
        return [g.labels[v] for v in cert.vertices()], "clique"
    return [g.labels[(i, 0)] for i in range(g.r)], "fallback"


# -- slope enumeration and error terms ------------------------------------------------


def shifted_slopes(rep: Point, lam: Fraction, d: SlopeDecomposition) -> List[Fraction]:
    """R(rep + q) for q along the line lam, ordered by the x of q."""
    return [slope_of_sum(rep, q) for q in d.points(lam)]


def error_term(l1, l2, l3, l4, reps: Dict[Fraction, Point], d: SlopeDecomposition) -> int:
    """|R(rep_l3 + line l1) & R(rep_l4 + line l2)|."""
    if (l1, l3) == (l2, l4):
        raise InputError("error_term needs (l1, l3) != (l2, l4)")
    for lam in (l3, l4):
        if lam not in reps:
            raise InputError(f"no representative for slope {lam}")
    a = set(shifted_slopes(reps[l3], l1, d))
    b = set(shifted_slopes(reps[l4], l2, d))
    return len(a & b)


# -- certifiers ---------------------------------------------------------------------


@dataclass
class ClusterReport:
    index: int
    band: Tuple[Fraction, Fraction]
    witnesses: int
    main_exact: int
    main_tau: int
    error_sum: int
    rep_tag: str
    refinement_ok: bool
    P_size: int
    candidate_points: int
    measured_C: Optional[float]
    cross_max: int = 0
    same_max: int = 0


@dataclass
class CertifiedBound:
    witnesses: RatSet
    per_cluster: List[ClusterReport]
    mode: str
    regime_ok: bool
    selection: Optional[PigeonholeSelection] = None
    M: Optional[int] = None
    N: Optional[int] = None
    conditions: List[Condition] = field(default_factory=list)
    reason: str = ""
    cluster_witnesses: List[RatSet] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.witnesses)


def born_bands(A: RatSet, d: Optional[SlopeDecomposition] = None):
    """[(lam_i, lam_{i+1}, slopes)] from the neighbour-line construction."""
    if d is None:
        d = slope_decomposition(A)
    out = []
    for lo, hi in zip(d.slopes, d.slopes[1:]):
        p = d.points(lo)[0]
        out.append((lo, hi, shifted_slopes(p, hi, d)))
    return out


def certify_born(A: RatSet) -> CertifiedBound:
    """n^2 - 1 distinct witnesses from consecutive line pairs."""
    _check_positive(A)
    if len(A) < 2:
        return CertifiedBound(RatSet(), [], "born-fallback", False, reason="|A| < 2")
    d = slope_decomposition(A)
    found = set()
    for lo, hi, slopes in born_bands(A, d):
        for prev, cur in zip(slopes, slopes[1:]):
            if not prev < cur:
                raise InvariantViolation("shifted slopes not strictly increasing")
        if not all(lo < s < hi for s in slopes):
            raise InvariantViolation(f"witness outside band ({lo}, {hi})")
        found.update(slopes)
    n = len(A)
    if len(found) != n * n - 1:
        raise InvariantViolation(f"born certifier found {len(found)} != n^2 - 1 witnesses")
    return CertifiedBound(RatSet._from_fractions(found), [], "born-fallback", False)


def _fallback(A: RatSet, reason: str, **info) -> CertifiedBound:
    out = certify_born(A)
    out.reason = reason
    for key, val in info.items():
        setattr(out, key, val)
    return out


def certify_full(
    A: RatSet,
    M: Optional[int] = None,
    N: Optional[int] = None,
    c_M: Fraction = DEFAULT_C_M,
    c_N: Fraction = DEFAULT_C_N,
    C: Optional[Fraction] = None,
    C_prime: Optional[Fraction] = None,
    seed: int = 0,
) -> CertifiedBound:
    """Full cluster pipeline; falls back to :func:`certify_born` when the run
    cannot proceed (degenerate M, N or a failed refinement).

    With explicit M, N the constants conditions are still reported, but only
    (req1) and the refinements gate the run: the witness count is produced
    by exact enumeration and stays sound regardless of the constants.
    """
    _check_positive(A)
    if len(A) < 2:
        raise InputError("certify_full needs |A| >= 2")
    d = slope_decomposition(A)
    sel = dyadic_select(d)
    tau = sel.tau
    M_used, N_used, conds = choose_parameters(tau, c_M, c_N, len(sel.S), C, C_prime, M, N)
    info = dict(selection=sel, M=M_used, N=N_used, conditions=conds)

    status = {c.id: c.status for c in conds}
    if status["req1"] != OK:
        return _fallback(A, "req1 violated", **info)
    if M is None and N is None:
        blocked = [c.id for c in conds if c.status == VIOLATED]
        if blocked:
            return _fallback(A, "violated: " + ",".join(blocked), **info)

    plan = build_clusters(sel, M_used, N_used, c_M, c_N, conds)
    reports, per_sets = [], []
    for j, cluster in enumerate(plan.clusters):
        ts = technical_filter(cluster, d, tau)
        if not ts.refinement_ok:
            return _fallback(A, f"refinement failed in cluster {j}", **info)
        g = build_good_pair_graph(ts, ts.U, tau, d)
        rep_list, tag = select_representatives(g, seed + j)
        reps = dict(zip(ts.T_pp, rep_list))
        report, slopes = _account_cluster(j, plan.band(j), ts, reps, tag, tau, d)
        reports.append(report)
        per_sets.append(slopes)

    for i in range(len(per_sets)):
        for k in range(i + 1, len(per_sets)):
            if not per_sets[i].isdisjoint(per_sets[k]):
                raise InvariantViolation(f"clusters {i} and {k} share witnesses")
    witnesses = RatSet._from_fractions(s for part in per_sets for s in part.as_frozenset())
    return CertifiedBound(
        witnesses, reports, "full-pipeline", True, reason="", cluster_witnesses=per_sets, **info
    )


def _account_cluster(j, band, ts: TechnicalSubset, reps, tag, tau, d):
    """Enumerate R_j' and check |R_j'| >= main - sum of overcount terms."""
    lo, hi = band
    index_pairs = [(lam, lamp) for lam in ts.U for lamp in ts.T_pp]
    union = set()
    for lam, lamp in index_pairs:
        slopes = shifted_slopes(reps[lamp], lam, d)
        for prev, cur in zip(slopes, slopes[1:]):
            if not prev < cur:
                raise InvariantViolation("shifted slopes not strictly increasing")
        union.update(slopes)
    if not all(lo <= s <= hi for s in union):
        raise InvariantViolation(f"cluster {j} witness outside its band")

    error_sum = cross_max = same_max = 0
    for (l1, l3), (l2, l4) in product(index_pairs, index_pairs):
        if (l1, l3) == (l2, l4):
            continue
        e = error_term(l1, l2, l3, l4, reps, d)
        error_sum += e
        if l3 != l4:
            cross_max = max(cross_max, e)
            if tag == "clique" and e ** 25 > tau ** 19:
                raise InvariantViolation(f"clique representatives give E={e} > tau^(19/25)")
        else:
            same_max = max(same_max, e)
            if e ** 25 > tau ** 24:
                raise InvariantViolation(f"same-line E={e} > tau^(24/25)")

    main_exact = sum(d.multiplicity(lam) for lam, _ in index_pairs)
    main_tau = len(index_pairs) * tau
    if len(union) < main_exact - error_sum:
        raise InvariantViolation(f"cluster {j}: |R'|={len(union)} < {main_exact} - {error_sum}")
    report = ClusterReport(
        index=j,
        band=band,
        witnesses=len(union),
        main_exact=main_exact,
        main_tau=main_tau,
        error_sum=error_sum,
        rep_tag=tag,
        refinement_ok=ts.refinement_ok,
        P_size=len(ts.P),
        candidate_points=len(ts.richness),
        measured_C=ts.measured_C,
        cross_max=cross_max,
        same_max=same_max,
    )
    return report, RatSet._from_fractions(union)


def incidence_instances(A: RatSet, M: int, N: int):
    """Yield (cluster index, (lam1, lam2), family L, grid) for every cluster
    of a run with the given M, N and every ordered distinct pair from U_j."""
    d = slope_decomposition(A)
    sel = dyadic_select(d)
    plan = build_clusters(sel, M, N)
    for j, (T, U) in enumerate(plan.clusters):
        for l1 in U:
            for l2 in U:
                if l1 == l2:
                    continue
                family = [CurveL(p[0], lam, l1, l2) for lam in T for p in d.points(lam)]
                yield j, (l1, l2), family, PointGrid(d.lines[l1], d.lines[l2])
