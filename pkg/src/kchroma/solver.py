"""Sample, extend, resample: the randomized list-coloring procedure.

A partial coloring of V_1..V_{k-1} is sampled; every V_k vertex whose list
has an unblocked color takes the smallest one.  While some V_k vertex is
blocked, the colors of its neighborhood (the variables its blocking event
depends on) are redrawn, Moser-Tardos style, always fixing the
lowest-indexed blocked vertex first.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .hypergraph import KPartiteHypergraph, VertexId
from .lists import ColorList, ListAssignment
from .sampler import Distribution, PartialColoring, RankSampler, blocked_matrix, make_rng, sample_partial


class Status(str, enum.Enum):
    SUCCESS = "SUCCESS"
    BUDGET_EXHAUSTED = "BUDGET_EXHAUSTED"


@dataclass
class SolveOutcome:
    status: Status
    coloring: dict[VertexId, int] | None
    rounds: int
    resamples: int
    initial_blocked: int
    blocked_history: list[int] = field(default_factory=list)  # blocked count after each resample

    def to_json(self) -> dict:
        return {
            "schema": "kchroma-solve v1",
            "status": self.status.value,
            "rounds": self.rounds,
            "resamples": self.resamples,
            "initial_blocked": self.initial_blocked,
            "blocked_history": self.blocked_history,
            "coloring": None if self.coloring is None else {str(v): c for v, c in sorted(self.coloring.items())},
        }


def extend(h: KPartiteHypergraph, L: ListAssignment | np.ndarray, phi: PartialColoring):
    """Color each unblocked V_k vertex with its smallest unblocked color.

    Returns ``(colors, blocked)``: a full color array by global id (-1 on
    blocked vertices) and the list of blocked V_k vertices.
    """
    A = L if isinstance(L, np.ndarray) else L.array(h)
    return _extend(h, A, phi.colors)


def _extend(h: KPartiteHypergraph, A: np.ndarray, colors: np.ndarray):
    off = h.offsets[h.k - 1]
    bm = blocked_matrix(h, A, colors)
    out = colors.copy()
    free = ~bm
    ok = free.any(axis=1)
    first = free.argmax(axis=1)
    rows = np.nonzero(ok)[0]
    out[off + rows] = A[off + rows, first[rows]]
    out[off + np.nonzero(~ok)[0]] = -1
    blocked = [VertexId(h.k, int(j)) for j in np.nonzero(~ok)[0]]
    return out, blocked


def _to_dict(h: KPartiteHypergraph, colors: np.ndarray) -> dict[VertexId, int]:
    return {v: int(colors[g]) for g, v in enumerate(h.vertices())}


def default_budget(h: KPartiteHypergraph) -> int:
    return 100 * h.part_sizes[-1]


class _BlockState:
    """Per-color counts of problematic edges at each V_k vertex, updated edge by edge."""

    def __init__(self, h: KPartiteHypergraph, A: np.ndarray, colors: np.ndarray):
        off = h.offsets[h.k - 1]
        nk = h.part_sizes[-1]
        self.q = A.shape[1]
        ea = h.edge_array.tolist()
        self.front = [row[:-1] for row in ea]
        self.last = [row[-1] - off for row in ea]
        self.pos = [{c: i for i, c in enumerate(A[off + j].tolist())} for j in range(nk)]
        self.inc = h.incidence
        self.colors = colors.tolist()
        self.cnt = [[0] * self.q for _ in range(nk)]
        self.covered = [0] * nk
        self.blocked: set[int] = set()
        self.status = [self._status(e) for e in range(len(ea))]
        for e, st in enumerate(self.status):
            self._bump(e, st, 1)

    def _status(self, e: int) -> int:
        members = self.front[e]
        c = self.colors[members[0]]
        for u in members[1:]:
            if self.colors[u] != c:
                return -1
        return c

    def _bump(self, e: int, st: int, d: int) -> None:
        if st < 0:
            return
        j = self.last[e]
        p = self.pos[j].get(st)
        if p is None:
            return
        before = self.cnt[j][p]
        self.cnt[j][p] = before + d
        if d > 0 and before == 0:
            self.covered[j] += 1
            if self.covered[j] == self.q:
                self.blocked.add(j)
        elif d < 0 and before == 1:
            self.blocked.discard(j)
            self.covered[j] -= 1

    def recolor(self, us, new) -> None:
        touched = set()
        for u, c in zip(us, new):
            self.colors[u] = c
            touched.update(self.inc[u])
        for e in touched:
            st = self._status(e)
            old = self.status[e]
            if st != old:
                self._bump(e, old, -1)
                self._bump(e, st, 1)
                self.status[e] = st


def solve(h: KPartiteHypergraph, L: ListAssignment, q: int, budget: int | None = None, rng_seed: int = 0,
          distribution: Distribution = Distribution.TILTED, *, track: bool = False) -> SolveOutcome:
    """Find a proper L-coloring or give up after ``budget`` resample events.

    Regularity is not required: the procedure only looks at edge statuses.
    The final extension is recomputed from scratch as a cross-check of the
    incremental bookkeeping.
    """
    if L.q != q:
        raise ValueError(f"lists must all have size q={q}; normalize them first")
    if budget is None:
        budget = default_budget(h)
    A = L.array(h)
    rng = make_rng(rng_seed)
    phi = sample_partial(h, A, q, rng, distribution)
    off = h.offsets[h.k - 1]
    # resampled variables of each V_k vertex: the non-V_k members of its edges
    nbrs: list = [None] * h.part_sizes[-1]
    draw = RankSampler(h, q, distribution)
    rows = A.tolist()

    def neighbors(j: int) -> list[int]:
        if nbrs[j] is None:
            inc = list(h.incidence[off + j])
            nbrs[j] = np.unique(h.edge_array[inc, :-1]).tolist() if inc else []
        return nbrs[j]

    state = _BlockState(h, A, phi.colors)
    initial = len(state.blocked)
    history: list[int] = []
    resamples = 0
    while state.blocked and resamples < budget:
        u = neighbors(min(state.blocked))
        state.recolor(u, [rows[g][r] for g, r in zip(u, draw(rng, u))])
        resamples += 1
        if track:
            history.append(len(state.blocked))
    colors = np.array(state.colors, dtype=np.int64)
    full, blocked = _extend(h, A, colors)
    if {v.index for v in blocked} != state.blocked:
        raise AssertionError("incremental blocked set disagrees with a full recount")
    if blocked:
        return SolveOutcome(Status.BUDGET_EXHAUSTED, None, resamples + 1, resamples, initial, history)
    return SolveOutcome(Status.SUCCESS, _to_dict(h, full), resamples + 1, resamples, initial, history)


def verify(h: KPartiteHypergraph, L: Mapping[VertexId, ColorList], coloring: Mapping[VertexId, int]) -> list[str]:
    """Violations of properness or list membership; empty when the coloring is valid."""
    out = []
    for v in h.vertices():
        if v not in coloring or coloring[v] is None:
            out.append(f"vertex {v} is uncolored")
        elif coloring[v] not in L[v]:
            out.append(f"vertex {v} has color {coloring[v]} outside its list")
    for j, e in enumerate(h.edges):
        cs = {coloring.get(u) for u in e}
        if len(cs) == 1 and None not in cs:
            out.append(f"edge {j} ({' '.join(str(u) for u in e)}) is monochromatic")
    return out
