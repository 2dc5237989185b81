from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from conftest import brute_quotient, positive_sets
from sumquot.cli import generate_corpus
from sumquot.egtgraph import MultipartiteGraph, tightness_construction
from sumquot.errors import InputError, InvariantViolation
from sumquot.oracle import missing_witnesses, quotient_of_sums_exact
from sumquot.pipeline import (
    NOT_EVALUABLE,
    OK,
    VIOLATED,
    PigeonholeSelection,
    build_clusters,
    build_good_pair_graph,
    certify_born,
    certify_full,
    choose_parameters,
    dyadic_select,
    error_term,
    regime_ok,
    select_representatives,
    technical_filter,
)
from sumquot.ratcore import RatSet, slope_decomposition

AP16 = RatSet(range(1, 17))
GP40 = generate_corpus("gp", 40)
SMOOTH = RatSet(2 ** i * 3 ** j for i in range(6) for j in range(6))


def R(p):
    return Fraction(p[1]) / p[0]


def recount_L(p, l1, l2, d):
    """Slope coincidences R(p + u) == R(p + v), u on l1, v on l2, by brute force."""
    hits = 0
    for x in d.lines[l1]:
        for y in d.lines[l2]:
            s = R((p[0] + x, p[1] + l1 * x))
            t = R((p[0] + y, p[1] + l2 * y))
            hits += s == t
    return hits


def recount_Lprime(p, q, l1, l2, d):
    hits = 0
    for x in d.lines[l1]:
        for y in d.lines[l2]:
            hits += R((p[0] + x, p[1] + l1 * x)) == R((q[0] + y, q[1] + l2 * y))
    return hits


def selection_for(n_slopes, tau=1):
    S = RatSet(range(1, n_slopes + 1))
    return PigeonholeSelection(tau=tau, S=S, bucket_index=1, mass=n_slopes, t0=Fraction(1))


# -- dyadic selection -----------------------------------------------------------


def test_dyadic_select_one_two_three():
    sel = dyadic_select(slope_decomposition(RatSet([1, 2, 3])))
    assert sel.t0 == Fraction(9, 14)
    assert sel.tau == 1
    assert len(sel.S) == 6
    assert Fraction(1) not in sel.S
    assert sel.mass == 6


def test_dyadic_select_rejects_singleton():
    with pytest.raises(InputError):
        dyadic_select(slope_decomposition(RatSet([5])))


def test_dyadic_select_ap16_bound():
    d = slope_decomposition(AP16)
    sel = dyadic_select(d)
    # tau |S| >= n^2 / (4 (ceil log2 n + 1)) = 256 / 20
    assert 20 * sel.tau * len(sel.S) >= 256
    assert all(sel.tau <= d.multiplicity(lam) < 2 * sel.tau for lam in sel.S)


def test_dyadic_select_rich_sets():
    assert dyadic_select(slope_decomposition(GP40)).tau == 21
    assert dyadic_select(slope_decomposition(SMOOTH)).tau == 12


@given(positive_sets(min_size=2, max_size=10))
def test_dyadic_sandwich_and_mass(A):
    d = slope_decomposition(A)
    sel = dyadic_select(d)
    n = len(A)
    assert all(sel.tau <= d.multiplicity(lam) < 2 * sel.tau for lam in sel.S)
    assert sel.tau >= sel.t0
    assert sel.mass == max(sel.bucket_masses)
    assert sum(sel.bucket_masses) == n * n


# -- parameters -----------------------------------------------------------------------


def test_parameters_tau_one_degenerate():
    M, N, conds = choose_parameters(1, S_size=6)
    assert (M, N) == (0, 0)
    assert not regime_ok(conds)
    assert {c.id: c.status for c in conds}["req1"] == VIOLATED


def test_parameters_tau_two_to_25():
    M, N, conds = choose_parameters(2 ** 25, Fraction(1, 2), Fraction(1, 16), S_size=100)
    assert (M, N) == (16, 0)
    assert {c.id: c.status for c in conds}["req1"] == VIOLATED


def test_parameters_override_still_reported():
    M, N, conds = choose_parameters(1, S_size=6, M_override=2, N_override=1)
    status = {c.id: c.status for c in conds}
    assert (M, N) == (2, 1)
    assert status["req1"] == OK
    # c_N tau^(1/25) = 1/16 < 1
    assert status["7"] == VIOLATED
    assert status["3"] == status["4"] == NOT_EVALUABLE
    assert "6" not in status


def test_parameters_with_constants():
    _, _, conds = choose_parameters(2 ** 25, S_size=100, C=Fraction(1), C_prime=Fraction(1))
    status = {c.id: c.status for c in conds}
    assert status["4"] == OK  # 1/256 <= 1/8
    assert status["3"] == OK  # 4e/512 < 1
    _, _, conds = choose_parameters(2 ** 25, S_size=100, C_prime=Fraction(10 ** 6))
    assert {c.id: c.status for c in conds}["3"] == VIOLATED


def test_parameters_reject_tau_zero():
    with pytest.raises(InputError):
        choose_parameters(0)


@given(st.integers(1, 10 ** 40))
def test_parameters_floor_roots(tau):
    M, N, _ = choose_parameters(tau)
    # M = floor(tau^(1/5) / 2), N = floor(tau^(1/25) / 16)
    assert (2 * M) ** 5 <= tau < (2 * M + 2) ** 5
    assert (16 * N) ** 25 <= tau < (16 * N + 16) ** 25


# -- clusters --------------------------------------------------------------------------


@pytest.mark.parametrize("size, count", [(6, 2), (7, 2)])
def test_build_clusters_counts(size, count):
    plan = build_clusters(selection_for(size), 2, 1)
    assert len(plan.clusters) == count
    for T, U in plan.clusters:
        assert len(T) == 2 and len(U) == 1
        assert max(T) < min(U)
    bands = [plan.band(j) for j in range(count)]
    assert bands[0][1] < bands[1][0]


def test_build_clusters_rejects():
    with pytest.raises(InputError):
        build_clusters(selection_for(3), 3, 1)
    with pytest.raises(InputError):
        build_clusters(selection_for(6), 2, 0)


@given(st.integers(2, 40), st.integers(1, 6), st.integers(1, 6))
def test_build_clusters_partition(size, M, N):
    if M + N > size:
        return
    plan = build_clusters(selection_for(size), M, N)
    flat = [s for T, U in plan.clusters for s in T + U]
    assert flat == sorted(flat)
    assert len(set(flat)) == len(flat)
    assert size - len(flat) < M + N


# -- technical filter ----------------------------------------------------------------------


def test_filter_vacuous_for_single_U():
    d = slope_decomposition(AP16)
    sel = dyadic_select(d)
    plan = build_clusters(sel, 2, 1)
    T, U = plan.clusters[0]
    ts = technical_filter(plan.clusters[0], d, sel.tau)
    assert ts.P == frozenset(p for lam in T for p in d.points(lam))


def test_filter_ap16_recount():
    d = slope_decomposition(AP16)
    sel = dyadic_select(d)
    assert sel.tau == 1
    plan = build_clusters(sel, 8, 2)
    for cluster in plan.clusters:
        T, U = cluster
        ts = technical_filter(cluster, d, sel.tau)
        for lam in T:
            for p in d.points(lam):
                worst = max(recount_L(p, l1, l2, d) for l1 in U for l2 in U if l1 != l2)
                assert worst == ts.richness[p]
                # tau = 1: only richness <= 1 survives
                assert (p in ts.P) == (worst <= 1)


@pytest.mark.parametrize("A, M, N", [(GP40, 9, 2), (SMOOTH, 8, 2)])
def test_filter_rich_recount(A, M, N):
    d = slope_decomposition(A)
    sel = dyadic_select(d)
    plan = build_clusters(sel, M, N)
    cluster = plan.clusters[0]
    ts = technical_filter(cluster, d, sel.tau)
    T, U = cluster
    for lam in T:
        for p in d.points(lam):
            worst = max(recount_L(p, l1, l2, d) for l1 in U for l2 in U if l1 != l2)
            assert (p in ts.P) == (worst ** 25 <= sel.tau ** 24)
    assert ts.refinement_ok
    assert len(ts.T_pp) == -(-M // 8)
    per_line = -(-sel.tau // 4)
    for lam in ts.T_pp:
        pts = ts.lines_pp[lam]
        assert len(pts) == per_line
        assert list(pts) == sorted(pts)
        assert all(p in ts.P for p in pts)


# -- good-pair graph --------------------------------------------------------------------------


def test_good_pair_graph_recount():
    d = slope_decomposition(GP40)
    sel = dyadic_select(d)
    plan = build_clusters(sel, 16, 2)
    ts = technical_filter(plan.clusters[0], d, sel.tau)
    g = build_good_pair_graph(ts, ts.U, sel.tau, d)
    assert g.r == 2 and g.k == -(-sel.tau // 4)
    for s in range(g.k):
        for t in range(g.k):
            p, q = g.labels[(0, s)], g.labels[(1, t)]
            worst = max(recount_Lprime(p, q, l1, l2, d) for l1, l2 in product(ts.U, ts.U))
            assert g.adjacent((0, s), (1, t)) == (worst ** 25 <= sel.tau ** 19)


def test_good_pair_graph_needs_refinement():
    d = slope_decomposition(AP16)
    sel = dyadic_select(d)
    ts = technical_filter(build_clusters(sel, 2, 1).clusters[0], d, sel.tau)
    ts.refinement_ok = False
    with pytest.raises(InputError):
        build_good_pair_graph(ts, ts.U, sel.tau, d)


# -- representatives ----------------------------------------------------------------------------


def test_representatives_complete_graph():
    labels = {(i, s): (i, s) for i in range(3) for s in range(2)}
    g = MultipartiteGraph.from_predicate(3, 2, lambda u, v: True, labels)
    reps, tag = select_representatives(g, seed=1)
    assert tag == "clique"
    assert [p[0] for p in reps] == [0, 1, 2]


def test_representatives_tightness_fallback():
    t = tightness_construction(3, 4)
    labels = {(i, s): ("pt", i, s) for i in range(3) for s in range(4)}
    g = MultipartiteGraph(3, 4, t.edges, labels)
    reps, tag = select_representatives(g, seed=0, max_tries=50)
    assert tag == "fallback"
    assert reps == [("pt", 0, 0), ("pt", 1, 0), ("pt", 2, 0)]


# -- error terms ----------------------------------------------------------------------------------


def test_error_term_singletons():
    A = RatSet([1, 2, 3])
    d = slope_decomposition(A)
    lams = [lam for lam in d.slopes if d.multiplicity(lam) == 1][:3]
    reps = {lam: d.points(lam)[0] for lam in lams}
    e = error_term(lams[0], lams[1], lams[2], lams[2], reps, d)
    assert e <= 1


def test_error_term_symmetry_and_recount():
    d = slope_decomposition(SMOOTH)
    lams = d.slopes[10:14]
    reps = {lam: d.points(lam)[len(d.points(lam)) // 2] for lam in lams}
    for l1, l2, l3, l4 in product(lams, repeat=4):
        if (l1, l3) == (l2, l4):
            continue
        e = error_term(l1, l2, l3, l4, reps, d)
        assert e == error_term(l2, l1, l4, l3, reps, d)
        a = {R((reps[l3][0] + x, reps[l3][1] + l1 * x)) for x in d.lines[l1]}
        b = {R((reps[l4][0] + y, reps[l4][1] + l2 * y)) for y in d.lines[l2]}
        assert e == len(a & b)


def test_error_term_rejects():
    d = slope_decomposition(SMOOTH)
    l1, l2 = d.slopes[:2]
    reps = {l1: d.points(l1)[0]}
    with pytest.raises(InputError):
        error_term(l1, l1, l1, l1, reps, d)
    with pytest.raises(InputError):
        error_term(l1, l2, l1, l2, reps, d)


def test_same_line_error_bound_on_filtered_points():
    d = slope_decomposition(GP40)
    sel = dyadic_select(d)
    plan = build_clusters(sel, 9, 2)
    for cluster in plan.clusters:
        ts = technical_filter(cluster, d, sel.tau)
        for lam in ts.T_pp:
            reps = {lam: ts.lines_pp[lam][0]}
            for l1, l2 in product(ts.U, ts.U):
                if l1 != l2:
                    assert error_term(l1, l2, lam, lam, reps, d) ** 25 <= sel.tau ** 24


# -- certifiers ------------------------------------------------------------------------------------------


def test_born_one_two_three():
    out = certify_born(RatSet([1, 2, 3]))
    assert out.count == 8
    assert out.mode == "born-fallback"


def test_born_singleton_empty():
    assert certify_born(RatSet([1])).count == 0


def test_born_powers_of_two(small_gp):
    out = certify_born(small_gp)
    assert out.count == 15
    assert out.witnesses <= quotient_of_sums_exact(small_gp)


def test_born_rejects_nonpositive():
    with pytest.raises(InputError):
        certify_born(RatSet([-1, 2]))


@given(positive_sets(min_size=2, max_size=7))
def test_born_sound_and_exact(A):
    out = certify_born(A)
    assert out.count == len(A) ** 2 - 1
    assert set(out.witnesses) <= brute_quotient(A)


def test_full_default_falls_back():
    out = certify_full(RatSet([1, 2, 3]))
    assert out.mode == "born-fallback"
    assert out.count == 8
    assert out.M == 0


def test_full_ap16_small_override():
    out = certify_full(AP16, M=2, N=1)
    assert out.mode == "full-pipeline"
    Q = quotient_of_sums_exact(AP16)
    assert out.witnesses <= Q
    assert out.count <= len(Q)


@pytest.mark.parametrize("A, M, N", [(GP40, 16, 2), (SMOOTH, 9, 2)])
def test_full_rich_override(A, M, N):
    out = certify_full(A, M=M, N=N)
    assert out.mode == "full-pipeline"
    assert not missing_witnesses(A, out.witnesses)
    tau = out.selection.tau
    for rep, part in zip(out.per_cluster, out.cluster_witnesses):
        assert rep.witnesses == len(part)
        assert rep.witnesses >= rep.main_exact - rep.error_sum
        assert rep.rep_tag == "clique"
        assert rep.cross_max ** 25 <= tau ** 19
        assert rep.same_max ** 25 <= tau ** 24
        lo, hi = rep.band
        assert all(lo <= s <= hi for s in part)
    bands = [r.band for r in out.per_cluster]
    for (_, hi), (lo, _) in zip(bands, bands[1:]):
        assert hi < lo


def test_full_req1_fallback_reason():
    out = certify_full(AP16, M=1, N=2)
    assert out.mode == "born-fallback"
    assert out.reason == "req1 violated"


def test_full_seed_determinism():
    a = certify_full(GP40, M=9, N=2, seed=3)
    b = certify_full(GP40, M=9, N=2, seed=3)
    assert a.witnesses == b.witnesses
    assert [r.witnesses for r in a.per_cluster] == [r.witnesses for r in b.per_cluster]


@settings(max_examples=25)
@given(positive_sets(min_size=4, max_size=9), st.sampled_from([(2, 1), (3, 1), (2, 2)]), st.integers(0, 5))
def test_full_always_sound(A, MN, seed):
    try:
        out = certify_full(A, M=MN[0], N=MN[1], seed=seed)
    except InvariantViolation as exc:  # pragma: no cover - a failure here is a real bug
        pytest.fail(str(exc))
    assert set(out.witnesses) <= brute_quotient(A)
    if out.mode == "born-fallback":
        assert out.count == len(A) ** 2 - 1
