"""Ground truth at tiny scale and Monte Carlo estimators.

``exhaustive_colorable`` is a plain backtracking search and shares no code
with the solver.  ``choice_number`` searches for a list assignment with no
proper coloring.  Every edge has exactly one V_k member, so once colors on
V_1..V_{k-1} are fixed the V_k vertices decouple: an assignment is bad iff
each coloring of the front parts leaves some V_k vertex whose whole list is
blocked.  The search therefore enumerates front-part lists up to renaming
of colors and solves a covering problem for the V_k lists.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .hypergraph import KPartiteHypergraph, VertexId
from .lists import ListAssignment
from .sampler import Distribution, make_rng, problematic_prob, sample_ranks

CHUNK = 1 << 16


class GuardExceeded(RuntimeError):
    pass


# -- exhaustive colorability ----------------------------------------------


def _search_order(h: KPartiteHypergraph) -> list[int]:
    """Vertices in an order that closes edges early (greedy by shared edges)."""
    n = h.num_vertices
    placed = [False] * n
    order: list[int] = []
    score = np.zeros(n, dtype=np.int64)
    while len(order) < n:
        cand = [g for g in range(n) if not placed[g]]
        g = max(cand, key=lambda x: (score[x], h.degrees[x], -x))
        placed[g] = True
        order.append(g)
        for j in h.incidence[g]:
            for u in h.edge_array[j]:
                score[u] += 1
    return order


def exhaustive_colorable(h: KPartiteHypergraph, L: ListAssignment, guard: float = 1e8):
    """``(True, coloring)`` if a proper L-coloring exists, else ``(False, None)``."""
    space = math.prod(len(L[v]) for v in h.vertices())
    if space > guard:
        raise GuardExceeded(f"search space {space} exceeds guard {guard:g}")
    verts = h.vertices()
    lists = [L[v] for v in verts]
    order = _search_order(h)
    pos = {g: i for i, g in enumerate(order)}
    # edges checked when their last member (in search order) gets a color
    closing: list[list[tuple[int, ...]]] = [[] for _ in order]
    for row in h.edge_array:
        members = tuple(int(u) for u in row)
        closing[max(pos[u] for u in members)].append(members)
    color = [-1] * h.num_vertices

    def rec(i: int) -> bool:
        if i == len(order):
            return True
        g = order[i]
        for c in lists[g]:
            color[g] = c
            if all(any(color[u] != c for u in e) for e in closing[i]) and rec(i + 1):
                return True
        color[g] = -1
        return False

    if rec(0):
        return True, {v: color[g] for g, v in enumerate(verts)}
    return False, None


# -- choice number ---------------------------------------------------------


@dataclass
class ChoiceNumberResult:
    value: int | None  # None when ch > max_q
    witness: ListAssignment | None  # bad assignment with lists of size value - 1
    universe_size: int
    exact: bool  # universe large enough that renaming makes the search complete
    assignments_examined: int = 0
    per_q: dict = field(default_factory=dict)

    @property
    def caveat(self) -> str:
        if self.exact:
            return "universe covers every assignment up to color renaming"
        return f"search restricted to colors 0..{self.universe_size - 1}; lower bounds may be missed"


def _canonical_front_lists(n_front: int, q: int, universe: int):
    """Front-part list tuples, new colors introduced in increasing order."""
    def rec(i, used, acc):
        if i == n_front:
            yield tuple(acc)
            return
        for j in range(0, min(q, universe - used) + 1):
            if q - j > used:
                continue
            new = tuple(range(used, used + j))
            for old in itertools.combinations(range(used), q - j):
                acc.append(old + new)
                yield from rec(i + 1, used + j, acc)
                acc.pop()

    yield from rec(0, 0, [])


def _bad_last_lists(h: KPartiteHypergraph, front_lists, q: int):
    """V_k lists making the assignment uncolorable, or None."""
    nf = h.offsets[h.k - 1]
    nk = h.part_sizes[-1]
    off = nf
    ea = h.edge_array
    # blocked color sets at each V_k vertex for each coloring of the front
    blocked_sets = []
    for phi in itertools.product(*front_lists):
        sets = [set() for _ in range(nk)]
        for row in ea:
            c = phi[row[0]]
            if all(phi[u] == c for u in row[1:-1]):
                sets[row[-1] - off].add(c)
        if all(len(s) < q for s in sets):
            return None  # this coloring extends whatever the V_k lists are
        blocked_sets.append([frozenset(s) for s in sets])

    chosen: dict[int, frozenset] = {}

    def covered(i: int) -> bool:
        return any(s <= blocked_sets[i][w] for w, s in chosen.items())

    def rec() -> bool:
        open_ = [i for i in range(len(blocked_sets)) if not covered(i)]
        if not open_:
            return True
        # branch on the open coloring with the fewest ways to be covered
        def options(i):
            return [(w, frozenset(S)) for w in range(nk) if w not in chosen
                    for S in itertools.combinations(sorted(blocked_sets[i][w]), q)]
        best = min(open_, key=lambda i: len(options(i)))
        for w, S in options(best):
            chosen[w] = S
            if rec():
                return True
            del chosen[w]
        return False

    if rec():
        return dict(chosen)
    return None


def find_bad_assignment(h: KPartiteHypergraph, q: int, universe: int, guard: int = 10 ** 7):
    """A q-list assignment with no proper coloring, or None; plus a count of front assignments."""
    nf = h.offsets[h.k - 1]
    fronts = h.vertices()[:nf]
    lasts = h.vertices(h.k)
    examined = 0
    for front_lists in _canonical_front_lists(nf, q, universe):
        examined += 1
        if examined > guard:
            raise GuardExceeded(f"more than {guard} front assignments at q={q}")
        last = _bad_last_lists(h, front_lists, q)
        if last is not None:
            lists = {v: front_lists[i] for i, v in enumerate(fronts)}
            for j, v in enumerate(lasts):
                lists[v] = tuple(sorted(last[j])) if j in last else tuple(range(q))
            return ListAssignment(lists), examined
    return None, examined


def choice_number(h: KPartiteHypergraph, max_q: int, color_universe_size: int | None = None) -> ChoiceNumberResult:
    """Smallest q <= max_q such that every q-list assignment is colorable."""
    nf = h.offsets[h.k - 1]
    witness = None
    total = 0
    per_q = {}
    exact = True
    for q in range(1, max_q + 1):
        universe = q * h.num_vertices if color_universe_size is None else color_universe_size
        exact = exact and universe >= q * nf
        bad, examined = find_bad_assignment(h, q, universe)
        total += examined
        per_q[q] = {"bad_found": bad is not None, "front_assignments": examined, "universe": universe}
        if bad is None:
            return ChoiceNumberResult(q, witness, universe, exact, total, per_q)
        witness = bad
    return ChoiceNumberResult(None, witness, universe, exact, total, per_q)


# -- Monte Carlo estimators ------------------------------------------------


@dataclass
class EstimatorResult:
    estimate: float
    stderr: float
    trials: int
    seed: int
    hits: int = 0

    @classmethod
    def bernoulli(cls, hits: int, trials: int, seed: int) -> "EstimatorResult":
        p = hits / trials
        return cls(p, math.sqrt(p * (1 - p) / trials), trials, seed, hits)

    def to_json(self) -> dict:
        return {"estimate": self.estimate, "stderr": self.stderr, "trials": self.trials, "seed": self.seed,
                "hits": self.hits}


def _require_last(h: KPartiteHypergraph, v: VertexId) -> None:
    if not h.contains(v) or v.part != h.k:
        raise ValueError(f"{v} is not a vertex of V_{h.k}")


def _vertex_samples(h, A, q, v, trials, seed, distribution):
    """Yield (status matrix (t, deg), colors of v) chunk by chunk; chunk c uses stream (seed, c)."""
    g = h.gid(v)
    inc = list(h.incidence[g])
    members = h.edge_array[inc, :-1]
    gids, pos = np.unique(members, return_inverse=True)
    pos = pos.reshape(members.shape)
    done, chunk = 0, 0
    while done < trials:
        t = min(CHUNK, trials - done)
        rng = make_rng(seed, chunk)
        cols = A[gids[None, :], sample_ranks(h, q, rng, size=t, distribution=distribution, gids=gids)]
        first = cols[:, pos[:, 0]]
        agree = np.ones(first.shape, dtype=bool)
        for j in range(1, members.shape[1]):
            agree &= cols[:, pos[:, j]] == first
        yield np.where(agree, first, -1)
        done += t
        chunk += 1


def estimate_blocking(h: KPartiteHypergraph, L: ListAssignment, q: int, v: VertexId, trials: int, seed: int,
                      distribution: Distribution = Distribution.TILTED):
    """Estimates of P[B_v] and of P[X_c = 1] for each c in L(v), from one set of samples."""
    _require_last(h, v)
    colors = list(L[v])
    if not h.incidence[h.gid(v)]:
        zero = EstimatorResult.bernoulli(0, trials, seed)
        return zero, {c: EstimatorResult.bernoulli(0, trials, seed) for c in colors}
    A = L.array(h)
    hits_b = 0
    hits_c = np.zeros(len(colors), dtype=np.int64)
    for status in _vertex_samples(h, A, q, v, trials, seed, distribution):
        x = np.stack([(status == c).any(axis=1) for c in colors], axis=1)
        hits_c += x.sum(axis=0)
        hits_b += int(x.all(axis=1).sum())
    return (EstimatorResult.bernoulli(hits_b, trials, seed),
            {c: EstimatorResult.bernoulli(int(n), trials, seed) for c, n in zip(colors, hits_c)})


def estimate_block_prob(h, L, q, v, trials, seed, distribution=Distribution.TILTED) -> EstimatorResult:
    return estimate_blocking(h, L, q, v, trials, seed, distribution)[0]


def estimate_color_blocked(h, L, q, v, c, trials, seed, distribution=Distribution.TILTED) -> EstimatorResult:
    if c not in L[v]:
        raise ValueError(f"color {c} not in the list of {v}")
    return estimate_blocking(h, L, q, v, trials, seed, distribution)[1][c]


def estimate_edge_status(h: KPartiteHypergraph, L: ListAssignment, q: int, edge_index: int, c: int,
                         trials: int, seed: int, distribution: Distribution = Distribution.TILTED) -> EstimatorResult:
    """Frequency of phi_e = c."""
    A = L.array(h)
    members = h.edge_array[edge_index, :-1]
    hits, done, chunk = 0, 0, 0
    while done < trials:
        t = min(CHUNK, trials - done)
        cols = A[members[None, :], sample_ranks(h, q, make_rng(seed, chunk), size=t,
                                                 distribution=distribution, gids=members)]
        hits += int((cols == c).all(axis=1).sum())
        done += t
        chunk += 1
    return EstimatorResult.bernoulli(hits, trials, seed)


# -- exact blocking probabilities on stars --------------------------------


def is_star(h: KPartiteHypergraph, v: VertexId) -> bool:
    """True when the edges at ``v`` share no vertex other than ``v``."""
    seen: set[VertexId] = set()
    for e in h.incident_edges(v):
        others = [u for u in e if u != v]
        if seen.intersection(others):
            return False
        seen.update(others)
    return True


def color_blocked_product(h: KPartiteHypergraph, L: ListAssignment, q: int, v: VertexId, c: int,
                          distribution: Distribution = Distribution.TILTED) -> Fraction:
    """1 - prod_{e in E(v)} (1 - P_e(c)): an upper bound, exact on stars."""
    prod = Fraction(1)
    for e in h.incident_edges(v):
        prod *= 1 - problematic_prob(e, c, L, q, distribution)
    return 1 - prod


def exact_block_prob_star(h: KPartiteHypergraph, L: ListAssignment, q: int, v: VertexId,
                          distribution: Distribution = Distribution.TILTED) -> Fraction:
    """Exact P[B_v] when the edges at ``v`` are disjoint apart from ``v``.

    Edge statuses are then independent, so a dynamic program over the set of
    already-blocked colors of L(v) is exact.
    """
    _require_last(h, v)
    if not is_star(h, v):
        raise ValueError(f"edges at {v} overlap outside {v}")
    colors = list(L[v])
    full = (1 << len(colors)) - 1
    dist = {0: Fraction(1)}
    for e in h.incident_edges(v):
        probs = [(1 << i, problematic_prob(e, c, L, q, distribution)) for i, c in enumerate(colors)]
        probs = [(b, p) for b, p in probs if p]
        rest = 1 - sum((p for _, p in probs), Fraction(0))
        new: dict[int, Fraction] = {}
        for s, w in dist.items():
            new[s] = new.get(s, Fraction(0)) + w * rest
            for b, p in probs:
                new[s | b] = new.get(s | b, Fraction(0)) + w * p
        dist = new
    return dist.get(full, Fraction(0))
