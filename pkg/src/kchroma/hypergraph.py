"""k-partite k-uniform hypergraphs.

Vertices are addressed as ``VertexId(part, index)`` with 1-based parts and
0-based indices local to the part.  Every vertex also has a global id
(``h.gid(v)``), obtained by laying the parts out one after another; the
numpy views used by the sampler and solver are indexed by global id.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np


class VertexId(NamedTuple):
    part: int
    index: int

    def __str__(self) -> str:
        return f"{self.part}:{self.index}"


Edge = tuple[VertexId, ...]


class InvalidHypergraphError(ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def _as_vertex(x) -> VertexId:
    if isinstance(x, VertexId):
        return x
    part, index = x
    return VertexId(int(part), int(index))


class KPartiteHypergraph:
    """Immutable k-partite k-graph.

    ``edges`` is a sequence of edges, each a sequence of ``k`` vertices given
    as ``VertexId`` or ``(part, index)`` pairs.  Members are stored sorted by
    part; edge order is kept as given so files round-trip verbatim.
    Construction raises ``InvalidHypergraphError`` unless ``check=False``,
    in which case :func:`validate` reports the problems instead.
    """

    def __init__(self, part_sizes: Sequence[int], edges: Iterable[Sequence], *, check: bool = True):
        self.part_sizes = tuple(int(n) for n in part_sizes)
        self.k = len(self.part_sizes)
        self.edges: tuple[Edge, ...] = tuple(
            tuple(sorted((_as_vertex(u) for u in e), key=lambda u: u.part)) for e in edges
        )
        if check:
            violations = validate(self)
            if violations:
                raise InvalidHypergraphError(violations)

    @classmethod
    def from_local(cls, part_sizes: Sequence[int], edges: Iterable[Sequence[int]]) -> "KPartiteHypergraph":
        """Build from edges given as tuples of local indices, one per part."""
        return cls(part_sizes, [[VertexId(i + 1, x) for i, x in enumerate(e)] for e in edges])

    # -- vertex addressing -------------------------------------------------

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for n in self.part_sizes:
            out.append(acc)
            acc += n
        return tuple(out)

    @property
    def num_vertices(self) -> int:
        return sum(self.part_sizes)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def gid(self, v: VertexId) -> int:
        return self.offsets[v.part - 1] + v.index

    def vertex(self, gid: int) -> VertexId:
        for part in range(self.k, 0, -1):
            if gid >= self.offsets[part - 1]:
                return VertexId(part, gid - self.offsets[part - 1])
        raise IndexError(gid)

    def vertices(self, part: int | None = None) -> list[VertexId]:
        parts = range(1, self.k + 1) if part is None else [part]
        return [VertexId(p, i) for p in parts for i in range(self.part_sizes[p - 1])]

    def contains(self, v: VertexId) -> bool:
        return 1 <= v.part <= self.k and 0 <= v.index < self.part_sizes[v.part - 1]

    def _require(self, v: VertexId) -> VertexId:
        v = _as_vertex(v)
        if not self.contains(v):
            raise KeyError(f"unknown vertex {v}")
        return v

    # -- incidence ---------------------------------------------------------

    @cached_property
    def edge_array(self) -> np.ndarray:
        """(m, k) array of member global ids; column i holds the part-(i+1) member."""
        arr = np.empty((len(self.edges), self.k), dtype=np.int64)
        for j, e in enumerate(self.edges):
            for i, u in enumerate(e):
                arr[j, i] = self.gid(u)
        return arr

    @cached_property
    def incidence(self) -> tuple[tuple[int, ...], ...]:
        """Edge indices incident to each vertex, by global id."""
        inc: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for j, row in enumerate(self.edge_array):
            for g in row:
                inc[g].append(j)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(x) for x in self.incidence], dtype=np.int64)

    def degree(self, v: VertexId) -> int:
        return int(self.degrees[self.gid(self._require(v))])

    def incident_edges(self, v: VertexId) -> list[Edge]:
        return [self.edges[j] for j in self.incidence[self.gid(self._require(v))]]

    def is_regular(self, delta: int | None = None) -> bool:
        if self.num_vertices == 0:
            return True
        d = int(self.degrees[0]) if delta is None else delta
        return bool(np.all(self.degrees == d))

    # -- equality ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, KPartiteHypergraph):
            return NotImplemented
        return self.part_sizes == other.part_sizes and set(self.edges) == set(other.edges)

    def __hash__(self) -> int:
        return hash((self.part_sizes, frozenset(self.edges)))

    def __repr__(self) -> str:
        return f"KPartiteHypergraph(k={self.k}, part_sizes={list(self.part_sizes)}, m={self.num_edges})"


def validate(h: KPartiteHypergraph) -> list[str]:
    """Return every invariant violation of ``h``; empty when valid."""
    out: list[str] = []
    if h.k < 2:
        out.append(f"k must be >= 2, got {h.k}")
    for i, n in enumerate(h.part_sizes, start=1):
        if n < 1:
            out.append(f"part {i} has non-positive size {n}")
    seen: set[Edge] = set()
    for j, e in enumerate(h.edges):
        label = " ".join(str(u) for u in e)
        if len(e) != h.k:
            out.append(f"edge {j} ({label}) has {len(e)} members, expected {h.k}")
        bad = [u for u in e if not h.contains(u)]
        for u in bad:
            out.append(f"edge {j} ({label}): vertex {u} out of range")
        if [u.part for u in e] != list(range(1, len(e) + 1)) and len(e) == h.k:
            out.append(f"edge {j} ({label}): edge not transversal")
        if e in seen:
            out.append(f"edge {j} ({label}): duplicate edge")
        seen.add(e)
    if out:
        return out
    # incidence must agree with a direct scan of the edge set
    counts = np.zeros(h.num_vertices, dtype=np.int64)
    for e in h.edges:
        for u in e:
            counts[h.gid(u)] += 1
    if not np.array_equal(counts, h.degrees):
        out.append("incidence lists inconsistent with edge set")
    return out


def max_degree(h: KPartiteHypergraph) -> int:
    return int(h.degrees.max()) if h.num_vertices and h.num_edges else 0


def neighborhood(h: KPartiteHypergraph, v: VertexId) -> set[VertexId]:
    """Vertices sharing an edge with ``v``, excluding ``v``."""
    v = h._require(v)
    out = {u for e in h.incident_edges(v) for u in e}
    out.discard(v)
    return out


def regular_embedding(h: KPartiteHypergraph, target_delta: int) -> tuple[KPartiteHypergraph, list[VertexId]]:
    """Embed ``h`` into a ``target_delta``-regular k-partite k-graph.

    Returns ``(h2, origin)`` where ``origin[g]`` is the vertex of ``h`` that
    global id ``g`` of ``h2`` copies.  Vertices of ``h`` keep their ids, and
    ``h`` is an induced sub-hypergraph of ``h2``.

    Construction: let ``R`` be the largest deficiency ``target - deg(v)``.
    Take ``k * R`` copies of ``h``, copy ``(j, r)`` having its parts rotated
    by ``j``.  For every vertex ``v`` with deficiency ``d`` and every
    ``s < d``, ``t < R`` add the edge through copy ``(0, t)`` of ``v`` and
    copies ``(j, t + s mod R)`` for ``j >= 1``.  The rotation makes each such
    edge transversal, distinct ``(t, s)`` give distinct edges, and every copy
    of ``v`` gains exactly ``d`` edges.
    """
    delta = max_degree(h)
    if target_delta < delta:
        raise ValueError(f"target_delta={target_delta} is below the maximum degree {delta}")
    k = h.k
    deficiency = target_delta - h.degrees
    R = int(deficiency.max()) if h.num_vertices else 0
    if R == 0:
        return h, h.vertices()

    # copy c = j * R + r of original part i lands in part ((i - 1 + j) % k) + 1
    new_sizes = [0] * k
    base: dict[tuple[int, int], int] = {}  # (copy, original part) -> local offset in target part
    for j in range(k):
        for r in range(R):
            c = j * R + r
            for i in range(1, k + 1):
                p = (i - 1 + j) % k
                base[(c, i)] = new_sizes[p]
                new_sizes[p] += h.part_sizes[i - 1]

    def copy_of(v: VertexId, j: int, r: int) -> VertexId:
        c = j * R + r
        return VertexId((v.part - 1 + j) % k + 1, base[(c, v.part)] + v.index)

    edges: list[list[VertexId]] = []
    for j in range(k):
        for r in range(R):
            for e in h.edges:
                edges.append([copy_of(u, j, r) for u in e])
    for g, v in enumerate(h.vertices()):
        for s in range(int(deficiency[g])):
            for t in range(R):
                edges.append([copy_of(v, 0, t)] + [copy_of(v, j, (t + s) % R) for j in range(1, k)])

    h2 = KPartiteHypergraph(new_sizes, edges)
    origin: list[VertexId] = [None] * h2.num_vertices  # type: ignore[list-item]
    for j in range(k):
        for r in range(R):
            for v in h.vertices():
                origin[h2.gid(copy_of(v, j, r))] = v
    return h2, origin


def embed_regular(h: KPartiteHypergraph, target_delta: int) -> KPartiteHypergraph:
    return regular_embedding(h, target_delta)[0]


def induced(h: KPartiteHypergraph, keep: Iterable[VertexId]) -> list[Edge]:
    """Edges of ``h`` whose members all lie in ``keep``."""
    keep = set(keep)
    return [e for e in h.edges if all(u in keep for u in e)]
