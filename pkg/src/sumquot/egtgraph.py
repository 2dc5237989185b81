"""Multipartite graphs and transversal cliques.

A vertex is a pair ``(part, slot)``.  A transversal clique picks one slot
from every part such that all picked vertices are pairwise adjacent.

The density condition compares every cross-part edge count with
k^2 (1 - 1/(e(2r-3))).  Since e is irrational the comparison runs against a
rational enclosure of e and may come back undecided.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

from sumquot.errors import InputError, InvariantViolation

Vertex = Tuple[int, int]

E_LOWER = Fraction(2718281828, 10 ** 9)
E_UPPER = Fraction(2718281829, 10 ** 9)


def _edge(u: Vertex, v: Vertex) -> Tuple[Vertex, Vertex]:
    return (u, v) if u < v else (v, u)


class MultipartiteGraph:
    """r parts of k slots each, edges only between different parts."""

    def __init__(self, r: int, k: int, edges: Iterable[Tuple[Vertex, Vertex]] = (), labels=None):
        if r < 0 or k < 0:
            raise InputError("r and k must be nonnegative")
        self.r = r
        self.k = k
        # optional payload per vertex, e.g. the grid point it stands for
        self.labels: Dict[Vertex, object] = dict(labels or {})
        es = set()
        for u, v in edges:
            for part, slot in (u, v):
                if not (0 <= part < r and 0 <= slot < k):
                    raise InputError(f"vertex {(part, slot)} out of range")
            if u[0] == v[0]:
                raise InputError(f"edge {u}-{v} lies inside a part")
            es.add(_edge(tuple(u), tuple(v)))
        self._edges: FrozenSet = frozenset(es)
        nbr: Dict[Vertex, set] = {(i, s): set() for i in range(r) for s in range(k)}
        for u, v in self._edges:
            nbr[u].add(v)
            nbr[v].add(u)
        self._nbr = {v: frozenset(ns) for v, ns in nbr.items()}

    @classmethod
    def complete(cls, r: int, k: int) -> "MultipartiteGraph":
        return cls.from_predicate(r, k, lambda u, v: True)

    @classmethod
    def from_predicate(cls, r: int, k: int, adjacent: Callable[[Vertex, Vertex], bool], labels=None) -> "MultipartiteGraph":
        edges = []
        for i, j in combinations(range(r), 2):
            for s in range(k):
                for t in range(k):
                    if adjacent((i, s), (j, t)):
                        edges.append(((i, s), (j, t)))
        return cls(r, k, edges, labels)

    @property
    def edges(self) -> FrozenSet:
        return self._edges

    def adjacent(self, u: Vertex, v: Vertex) -> bool:
        return v in self._nbr[u]

    def neighbours(self, v: Vertex) -> FrozenSet:
        return self._nbr[v]

    def __eq__(self, other):
        if not isinstance(other, MultipartiteGraph):
            return NotImplemented
        return (self.r, self.k, self._edges) == (other.r, other.k, other._edges)

    def __hash__(self):
        return hash((self.r, self.k, self._edges))

    def __repr__(self):
        return f"MultipartiteGraph(r={self.r}, k={self.k}, edges={len(self._edges)})"


@dataclass(frozen=True)
class CliqueCertificate:
    picks: Tuple[int, ...]
    tries: int = 0

    def vertices(self) -> List[Vertex]:
        return list(enumerate(self.picks))

    def verify(self, g: MultipartiteGraph) -> bool:
        if len(self.picks) != g.r:
            return False
        vs = self.vertices()
        return all(g.adjacent(u, v) for u, v in combinations(vs, 2))


def pair_density(g: MultipartiteGraph, i: int, j: int) -> int:
    if i == j:
        raise InputError("pair_density needs two different parts")
    return sum(1 for s in range(g.k) for v in g.neighbours((i, s)) if v[0] == j)


def densities(g: MultipartiteGraph) -> Dict[Tuple[int, int], int]:
    return {(i, j): pair_density(g, i, j) for i, j in combinations(range(g.r), 2)}


def egt_threshold(r: int, k: int, e: Fraction) -> Fraction:
    return k * k * (1 - 1 / (e * (2 * r - 3)))


def egt_condition(g: MultipartiteGraph) -> Optional[bool]:
    """True when every pair density is strictly above k^2(1 - 1/(e(2r-3))).

    Returns None (indeterminate) if some density falls inside the gap left
    by the enclosure of e.
    """
    if g.r < 2:
        raise InputError("egt_condition needs r >= 2")
    lo = egt_threshold(g.r, g.k, E_LOWER)
    hi = egt_threshold(g.r, g.k, E_UPPER)
    verdict: Optional[bool] = True
    for d in densities(g).values():
        if d > hi:
            continue
        if d <= lo:
            return False
        verdict = None
    return verdict


def max_deletions_per_pair(r: int, k: int) -> int:
    """Largest d such that k^2 - d edges between two parts certainly passes."""
    hi = egt_threshold(r, k, E_UPPER)
    d = k * k
    while d >= 0 and not (k * k - d > hi):
        d -= 1
    return d


def sample_transversal_clique(g: MultipartiteGraph, seed: int, max_tries: int) -> Optional[CliqueCertificate]:
    """Repeat the uniform one-vertex-per-part experiment until a clique appears.

    ``random.Random.randrange`` draws by rejection on getrandbits, so slot
    choices carry no modulo bias; the sequence is fixed by ``seed``.
    """
    if g.k == 0 and g.r > 0:
        return None
    rng = random.Random(seed)
    for t in range(1, max_tries + 1):
        picks = tuple(rng.randrange(g.k) for _ in range(g.r))
        cert = CliqueCertificate(picks, tries=t)
        if cert.verify(g):
            return cert
    return None


def backtrack_transversal_clique(g: MultipartiteGraph) -> Optional[CliqueCertificate]:
    """Exact search: returns a transversal clique iff one exists."""
    if g.r == 0:
        return CliqueCertificate(())
    # drop slots lacking a neighbour in some other part
    cands: Dict[int, set] = {}
    for i in range(g.r):
        keep = set()
        for s in range(g.k):
            hit = {p for p, _ in g.neighbours((i, s))}
            if len(hit) == g.r - 1:
                keep.add(s)
        if not keep:
            return None
        cands[i] = keep

    picks: Dict[int, int] = {}

    def extend(remaining: Dict[int, set]) -> bool:
        if not remaining:
            return True
        part = min(remaining, key=lambda p: (len(remaining[p]), p))
        for s in sorted(remaining[part]):
            nb = g.neighbours((part, s))
            nxt = {}
            for p, slots in remaining.items():
                if p == part:
                    continue
                left = {t for t in slots if (p, t) in nb}
                if not left:
                    break
                nxt[p] = left
            else:
                picks[part] = s
                if extend(nxt):
                    return True
                del picks[part]
        return False

    if not extend(cands):
        return None
    cert = CliqueCertificate(tuple(picks[i] for i in range(g.r)))
    if not cert.verify(g):
        raise InvariantViolation("backtracking produced a non-clique")
    return cert


def tightness_construction(r: int, k: int) -> MultipartiteGraph:
    """Complete r-partite graph with no transversal clique.

    Part 0 is cut into r-1 blocks of k/(r-1) slots; block t loses every edge
    to part t+1, so each pair (0, t+1) keeps exactly k^2 (1 - 1/(r-1)) edges.
    """
    if r < 2:
        raise InputError("tightness_construction needs r >= 2")
    if k % (r - 1):
        raise InputError("tightness_construction needs (r-1) | k")
    block = k // (r - 1)

    def adjacent(u: Vertex, v: Vertex) -> bool:
        if u[0] == 0:
            return v[0] != u[1] // block + 1
        return True

    return MultipartiteGraph.from_predicate(r, k, adjacent)


def random_dense_graph(r: int, k: int, seed: int, deletions: Optional[int] = None) -> MultipartiteGraph:
    """Complete r-partite graph minus up to ``deletions`` random edges per pair.

    By default ``deletions`` is the most the density condition tolerates, so
    every pair keeps a certified-passing density.
    """
    if deletions is None:
        deletions = max(0, max_deletions_per_pair(r, k))
    rng = random.Random(seed)
    edges = []
    for i, j in combinations(range(r), 2):
        pair = [((i, s), (j, t)) for s in range(k) for t in range(k)]
        drop = set(rng.sample(range(len(pair)), rng.randint(0, min(deletions, len(pair)))))
        edges.extend(e for idx, e in enumerate(pair) if idx not in drop)
    return MultipartiteGraph(r, k, edges)


def planted_clique_graph(r: int, k: int, seed: int, deletions: int) -> Tuple[MultipartiteGraph, Tuple[int, ...]]:
    """Complete graph minus ``deletions`` random edges per pair, never
    touching one planted transversal.  Returns the graph and the plant."""
    rng = random.Random(seed)
    plant = tuple(rng.randrange(k) for _ in range(r))
    edges = []
    for i, j in combinations(range(r), 2):
        pair = [((i, s), (j, t)) for s in range(k) for t in range(k)
                if not (s == plant[i] and t == plant[j])]
        drop = set(rng.sample(range(len(pair)), min(deletions, len(pair))))
        edges.extend(e for idx, e in enumerate(pair) if idx not in drop)
        edges.append(((i, plant[i]), (j, plant[j])))
    return MultipartiteGraph(r, k, edges), plant
