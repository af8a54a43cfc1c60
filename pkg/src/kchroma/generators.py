"""Test corpora: complete, random and regular k-partite k-graphs, and list families."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .hypergraph import KPartiteHypergraph, VertexId
from .lists import ListAssignment
from .sampler import make_rng

SIZE_GUARD = 10 ** 7


class ListStyle(str, enum.Enum):
    IDENTICAL = "IDENTICAL"
    DISJOINT_PER_PART = "DISJOINT_PER_PART"
    RANDOM_WINDOWED = "RANDOM_WINDOWED"
    LATIN = "LATIN"


def _check(k: int, n: int) -> None:
    if k < 2:
        raise ValueError("k must be >= 2")
    if n < 1:
        raise ValueError("n must be >= 1")
    if n ** k > SIZE_GUARD:
        raise ValueError(f"n^k = {n ** k} exceeds the size guard {SIZE_GUARD}")


def _from_codes(k: int, n: int, codes: np.ndarray) -> KPartiteHypergraph:
    """Edges from lexicographic codes in [0, n^k)."""
    digits = np.empty((len(codes), k), dtype=np.int64)
    rest = codes.copy()
    for j in range(k - 1, -1, -1):
        digits[:, j] = rest % n
        rest //= n
    edges = [tuple(VertexId(p + 1, int(i)) for p, i in enumerate(row)) for row in digits]
    return KPartiteHypergraph([n] * k, edges, check=False)


def complete_kpartite(k: int, n: int) -> KPartiteHypergraph:
    """K_{k*n}: every transversal k-set is an edge."""
    _check(k, n)
    h = _from_codes(k, n, np.arange(n ** k, dtype=np.int64))
    if not h.is_regular() or max(h.degrees) != n ** (k - 1):
        raise AssertionError("complete k-partite degree recount failed")
    return h


def random_kpartite(k: int, n: int, p_edge: float, seed: int) -> KPartiteHypergraph:
    """Each of the n^k transversal edges kept independently with probability ``p_edge``.

    One uniform draw per potential edge, in lexicographic order, from the
    stream (seed,), so an instance depends only on (k, n, p_edge, seed).
    """
    _check(k, n)
    if not 0.0 <= p_edge <= 1.0:
        raise ValueError("p_edge must lie in [0, 1]")
    rng = make_rng(seed)
    total = n ** k
    keep = []
    for start in range(0, total, 1 << 20):
        stop = min(total, start + (1 << 20))
        u = rng.random(stop - start)
        keep.append(start + np.nonzero(u < p_edge)[0])
    return _from_codes(k, n, np.concatenate(keep) if keep else np.zeros(0, dtype=np.int64))


def random_regular_kpartite(k: int, n: int, delta: int, seed: int, max_repairs: int = 10 ** 5) -> KPartiteHypergraph:
    """A delta-regular k-partite k-graph with n vertices per part.

    Each part contributes a shuffled sequence with every vertex repeated
    ``delta`` times; position t of all sequences forms edge t.  Repeated
    edges are repaired by swapping one coordinate with a random edge
    whenever both resulting edges are new.
    """
    _check(k, n)
    if not 0 <= delta <= n ** (k - 1):
        raise ValueError(f"delta must lie in [0, n^(k-1)] = [0, {n ** (k - 1)}]")
    rng = make_rng(seed)
    m = n * delta
    cols = [rng.permutation(np.repeat(np.arange(n), delta)) for _ in range(k)]
    mat = np.stack(cols, axis=1) if m else np.zeros((0, k), dtype=np.int64)
    rows = [tuple(int(x) for x in r) for r in mat]
    count: dict[tuple, int] = {}
    for r in rows:
        count[r] = count.get(r, 0) + 1
    repairs = 0
    for t in range(m):
        while count[rows[t]] > 1:
            repairs += 1
            if repairs > max_repairs:
                raise RuntimeError("could not remove repeated edges; delta too close to n^(k-1)")
            s = int(rng.integers(m))
            j = int(rng.integers(k))
            a = rows[t][:j] + rows[s][j:j + 1] + rows[t][j + 1:]
            b = rows[s][:j] + rows[t][j:j + 1] + rows[s][j + 1:]
            if a == b or a in count or b in count:
                continue
            for old in (rows[t], rows[s]):
                count[old] -= 1
                if not count[old]:
                    del count[old]
            rows[t], rows[s] = a, b
            count[a] = count.get(a, 0) + 1
            count[b] = count.get(b, 0) + 1
    edges = [tuple(VertexId(p + 1, int(i)) for p, i in enumerate(row)) for row in rows]
    h = KPartiteHypergraph([n] * k, edges)
    if m and not (h.is_regular() and h.degrees[0] == delta):
        raise AssertionError("regular generator degree recount failed")
    return h


def adversarial_lists(h: KPartiteHypergraph, q: int, style: ListStyle | str, seed: int = 0) -> ListAssignment:
    """List families that stress the analysis.

    IDENTICAL: {0..q-1} everywhere.  DISJOINT_PER_PART: part p gets
    {(p-1)q .. pq-1}, so no edge has a common color.  RANDOM_WINDOWED:
    independent q-subsets of {0..2q-1}.  LATIN: k = 2 complete instances
    with at least C(2q-1, q) vertices per part; both sides receive every
    q-subset of {0..2q-2}, which admits no proper coloring.
    """
    style = ListStyle(style)
    if q < 1:
        raise ValueError("q must be >= 1")
    verts = h.vertices()
    if style is ListStyle.IDENTICAL:
        return ListAssignment.uniform(h, q)
    if style is ListStyle.DISJOINT_PER_PART:
        return ListAssignment({v: range((v.part - 1) * q, v.part * q) for v in verts})
    if style is ListStyle.RANDOM_WINDOWED:
        rng = make_rng(seed, 1)
        return ListAssignment({v: rng.choice(2 * q, size=q, replace=False) for v in verts})
    # LATIN
    need = math.comb(2 * q - 1, q)
    n = min(h.part_sizes)
    if h.k != 2 or len(set(h.part_sizes)) != 1 or h.num_edges != n * n:
        raise ValueError("LATIN lists need a complete bipartite instance K_{n,n}")
    if n < need:
        raise ValueError(f"LATIN lists with q={q} need n >= C({2 * q - 1},{q}) = {need}")
    subsets = list(itertools.combinations(range(2 * q - 1), q))
    return ListAssignment({v: subsets[min(v.index, need - 1)] for v in verts})


# -- corpora ----------------------------------------------------------------


@dataclass
class CorpusItem:
    name: str
    h: KPartiteHypergraph
    lists: ListAssignment
    q: int


def tiny_corpus(seed: int = 0, random_count: int = 40) -> list[CorpusItem]:
    """Instances with at most 12 vertices and q in {2, 3}, fixed by ``seed``.

    Besides the random draws it holds uncolorable items: LATIN lists on
    K_{3,3} and bad 2-list assignments on K_{4,4} and K_{5,5} found by the
    choice-number search.
    """
    from .oracle import find_bad_assignment

    items = [
        CorpusItem("K33-latin-q2", complete_kpartite(2, 3), adversarial_lists(complete_kpartite(2, 3), 2, "LATIN"), 2),
        CorpusItem("K2x6-identical-q2", complete_kpartite(2, 6), ListAssignment.uniform(complete_kpartite(2, 6), 2), 2),
        CorpusItem("K3x2-identical-q2", complete_kpartite(3, 2), ListAssignment.uniform(complete_kpartite(3, 2), 2), 2),
        CorpusItem("K3x3-identical-q2", complete_kpartite(3, 3), ListAssignment.uniform(complete_kpartite(3, 3), 2), 2),
        CorpusItem("K3x4-identical-q2", complete_kpartite(3, 4), ListAssignment.uniform(complete_kpartite(3, 4), 2), 2),
        CorpusItem("K4x3-identical-q2", complete_kpartite(4, 3), ListAssignment.uniform(complete_kpartite(4, 3), 2), 2),
    ]
    for n in (4, 5):
        h = complete_kpartite(2, n)
        bad, _ = find_bad_assignment(h, 2, 4 * n)
        items.append(CorpusItem(f"K{n}{n}-bad-q2", h, bad, 2))
    rng = make_rng(seed, 7)
    shapes = [(2, 4), (2, 5), (2, 6), (3, 3), (3, 4), (4, 3)]
    for t in range(random_count):
        k, n = shapes[t % len(shapes)]
        q = 2 + int(rng.integers(2))
        p = float(rng.uniform(0.5, 1.0))
        h = random_kpartite(k, n, p, seed=int(rng.integers(2 ** 31)))
        style = ListStyle.RANDOM_WINDOWED if t % 3 else ListStyle.IDENTICAL
        L = adversarial_lists(h, q, style, seed=int(rng.integers(2 ** 31)))
        items.append(CorpusItem(f"rand{t}-k{k}n{n}-{style.value.lower()}-q{q}", h, L, q))
    return items
