"""Color lists, the rank function and common lists of edges."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .hypergraph import Edge, KPartiteHypergraph, VertexId

ColorList = tuple[int, ...]


class InsufficientListError(ValueError):
    pass


def color_list(colors: Iterable[int]) -> ColorList:
    """Ascending, duplicate-free tuple of nonnegative colors."""
    out = tuple(sorted(int(c) for c in colors))
    if any(c < 0 for c in out):
        raise ValueError(f"negative color in {out}")
    if len(set(out)) != len(out):
        raise ValueError(f"duplicate color in {out}")
    return out


class ListAssignment(Mapping[VertexId, ColorList]):
    """Per-vertex ascending color lists."""

    def __init__(self, lists: Mapping[VertexId, Iterable[int]]):
        self._lists = {VertexId(*v): color_list(cs) for v, cs in lists.items()}

    @classmethod
    def uniform(cls, h: KPartiteHypergraph, q: int) -> "ListAssignment":
        full = tuple(range(q))
        return cls({v: full for v in h.vertices()})

    def __getitem__(self, v: VertexId) -> ColorList:
        return self._lists[v]

    def __iter__(self):
        return iter(self._lists)

    def __len__(self) -> int:
        return len(self._lists)

    def __eq__(self, other) -> bool:
        if isinstance(other, ListAssignment):
            return self._lists == other._lists
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._lists.items()))

    def __repr__(self) -> str:
        return f"ListAssignment({len(self._lists)} vertices, q={self.q})"

    @property
    def q(self) -> int | None:
        """Common list size, or None if the sizes differ."""
        sizes = {len(cs) for cs in self._lists.values()}
        return sizes.pop() if len(sizes) == 1 else None

    def is_uniform(self) -> bool:
        q = self.q
        return q is not None and all(cs == tuple(range(q)) for cs in self._lists.values())

    def missing(self, h: KPartiteHypergraph) -> list[VertexId]:
        return [v for v in h.vertices() if v not in self._lists]

    def array(self, h: KPartiteHypergraph) -> np.ndarray:
        """(|V|, q) int array of lists by global id; requires equal sizes."""
        q = self.q
        if q is None:
            raise ValueError("lists must have a common size; call normalize_lists first")
        out = np.empty((h.num_vertices, q), dtype=np.int64)
        for g, v in enumerate(h.vertices()):
            out[g] = self._lists[v]
        return out


def index_of(L: Sequence[int], c: int, q: int) -> Fraction:
    """1-based rank of ``c`` in ascending ``L``; ``4q/3`` when ``c`` is absent.

    The sentinel is exact so the tilted weight ``1 - 3 i / (4 q)`` is exactly
    zero for absent colors.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    lo, hi = 0, len(L)
    while lo < hi:
        mid = (lo + hi) // 2
        if L[mid] < c:
            lo = mid + 1
        else:
            hi = mid
    if lo < len(L) and L[lo] == c:
        return Fraction(lo + 1)
    return Fraction(4 * q, 3)


def common_list(L: Mapping[VertexId, ColorList], e: Edge) -> ColorList:
    """Colors shared by every member of ``e``."""
    members = iter(e)
    common = set(L[next(members)])
    for u in members:
        common.intersection_update(L[u])
    return tuple(sorted(common))


def normalize_lists(L: ListAssignment, q: int) -> ListAssignment:
    """Truncate every list to its ``q`` smallest colors."""
    short = [v for v, cs in L.items() if len(cs) < q]
    if short:
        raise InsufficientListError(
            f"insufficient list: {len(short)} vertices have fewer than {q} colors (first: {short[0]})"
        )
    return ListAssignment({v: cs[:q] for v, cs in L.items()})
