"""Random partial colorings of V_1..V_{k-1} and the blocking events at V_k.

Colors on V_1 are drawn from the tilted distribution, which favours the
low-ranked colors of each list:

    P[phi(u) = c] = (8/5) / (q (1 - 3/(5q))) * (1 - 3 i / (4q)),   i = rank of c,

which simplifies to ``2 (4q - 3i) / (q (5q - 3))``.  Vertices of
V_2..V_{k-1} draw uniformly.  ``Distribution.UNIFORM_ALL`` draws every part
uniformly and serves as the baseline for comparisons.

Exact probabilities are ``Fraction``s.  Sampling draws a list rank by
inverting the cumulative distribution in floating point and then reads the
color from the vertex's list; the rank distribution does not depend on the
list contents.
"""

from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .hypergraph import Edge, KPartiteHypergraph, VertexId
from .lists import ColorList, ListAssignment, common_list, index_of


class Distribution(str, enum.Enum):
    TILTED = "TILTED"
    UNIFORM_ALL = "UNIFORM_ALL"


STAR = "*"


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator for the stream ``stream`` under master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream)))


def _as_rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return make_rng(seed_or_rng)


# -- exact probabilities ---------------------------------------------------


def tilted_weight(i, q: int) -> Fraction:
    """Tilted probability of the color at rank ``i`` (exact)."""
    i = Fraction(i)
    return Fraction(8, 5) / (q * (1 - Fraction(3, 5 * q))) * (1 - Fraction(3, 4 * q) * i)


def tilted_prob(u_part: int, L_u: ColorList, c: int, q: int, k: int) -> Fraction:
    """P[phi(u) = c] for a vertex of part ``u_part``."""
    if q < 2:
        raise ValueError("q must be >= 2")
    if not 1 <= u_part < k:
        raise ValueError(f"part {u_part} is not sampled (only parts 1..{k - 1} are)")
    if len(L_u) != q:
        raise ValueError(f"list has {len(L_u)} colors, expected {q}")
    if c not in L_u:
        raise ValueError(f"color {c} not in list")
    if u_part == 1:
        return tilted_weight(index_of(L_u, c, q), q)
    return Fraction(1, q)


def index_probabilities(q: int, tilted: bool = True) -> np.ndarray:
    """Float probabilities of drawing list ranks 1..q."""
    if q < 2:
        raise ValueError("q must be >= 2")
    if not tilted:
        return np.full(q, 1.0 / q)
    i = np.arange(1, q + 1, dtype=np.float64)
    return 2.0 * (4.0 * q - 3.0 * i) / (q * (5.0 * q - 3.0))


def problematic_prob(
    e: Edge,
    c: int,
    L: Mapping[VertexId, ColorList],
    q: int,
    distribution: Distribution = Distribution.TILTED,
) -> Fraction:
    """P[phi_e = c] for ``c`` in the common list of ``e``; 0 otherwise.

    For ``c`` in the list of the V_k member this is exactly the probability
    that the first k-1 members all receive ``c``.
    """
    k = len(e)
    if c not in common_list(L, e):
        return Fraction(0)
    if distribution is Distribution.UNIFORM_ALL:
        return Fraction(1, q ** (k - 1))
    return tilted_weight(index_of(L[e[0]], c, q), q) / q ** (k - 2)


def p_edge_max(k: int, q: int, distribution: Distribution = Distribution.TILTED) -> Fraction:
    if distribution is Distribution.UNIFORM_ALL:
        return Fraction(1, q ** (k - 1))
    return tilted_weight(1, q) / q ** (k - 2)


def rho(h: KPartiteHypergraph, L: Mapping[VertexId, ColorList], q: int, v: VertexId, c: int,
        distribution: Distribution = Distribution.TILTED) -> Fraction:
    """Expected number of edges at ``v`` problematic for ``c`` (exact)."""
    _require_last_part(h, v)
    return sum((problematic_prob(e, c, L, q, distribution) for e in h.incident_edges(v)), Fraction(0))


def rho_vector(h: KPartiteHypergraph, A: np.ndarray, q: int, v: VertexId,
               distribution: Distribution = Distribution.TILTED) -> np.ndarray:
    """Float rho(v, c) for each color of ``v``'s list, in list order.

    ``A`` is the list array from ``ListAssignment.array(h)``.
    """
    _require_last_part(h, v)
    g = h.gid(v)
    inc = list(h.incidence[g])
    if not inc:
        return np.zeros(q)
    members = h.edge_array[inc, : h.k - 1]  # (deg, k-1)
    cv = A[g]
    # eq[d, j, s, t]: color t of v sits at position s of member j's list
    eq = A[members][:, :, :, None] == cv[None, None, None, :]
    in_common = eq.any(axis=2).all(axis=1)  # (deg, q)
    if distribution is Distribution.UNIFORM_ALL:
        w = np.full(in_common.shape, 1.0 / q ** (h.k - 1))
    else:
        rank = eq[:, 0].argmax(axis=1) + 1  # rank in the V_1 member's list
        w = index_probabilities(q)[rank - 1] / float(q) ** (h.k - 2)
    return (w * in_common).sum(axis=0)


def _require_last_part(h: KPartiteHypergraph, v: VertexId) -> None:
    if not h.contains(v):
        raise KeyError(f"unknown vertex {v}")
    if v.part != h.k:
        raise ValueError(f"{v} is not in the last part V_{h.k}")


# -- sampling ---------------------------------------------------------------


@dataclass
class PartialColoring:
    """Colors by global id; -1 marks an uncolored vertex."""

    h: KPartiteHypergraph
    colors: np.ndarray

    def __getitem__(self, v: VertexId) -> int | None:
        c = int(self.colors[self.h.gid(v)])
        return None if c < 0 else c

    def copy(self) -> "PartialColoring":
        return PartialColoring(self.h, self.colors.copy())


def _rank_cdfs(h: KPartiteHypergraph, q: int, distribution: Distribution) -> list[np.ndarray]:
    tilted = index_probabilities(q, True)
    uniform = index_probabilities(q, False)
    out = []
    for part in range(1, h.k):
        p = tilted if (part == 1 and distribution is Distribution.TILTED) else uniform
        cdf = np.cumsum(p)
        cdf[-1] = 1.0
        out.append(cdf)
    return out


def sample_ranks(h: KPartiteHypergraph, q: int, rng: np.random.Generator, size: int | None = None,
                 distribution: Distribution = Distribution.TILTED, gids: np.ndarray | None = None) -> np.ndarray:
    """0-based list positions for the sampled vertices ``gids`` (default: all of V_1..V_{k-1}).

    Returns shape ``(len(gids),)`` or ``(size, len(gids))``.
    """
    ncol = h.offsets[h.k - 1]
    if gids is None:
        gids = np.arange(ncol)
    shape = (len(gids),) if size is None else (size, len(gids))
    u = rng.random(shape)
    cdfs = _rank_cdfs(h, q, distribution)
    parts = np.searchsorted(np.array(h.offsets[1:]), gids, side="right")  # 0-based part
    out = np.empty(shape, dtype=np.int64)
    for p, cdf in enumerate(cdfs):
        cols = parts == p
        if cols.any():
            out[..., cols] = np.searchsorted(cdf, u[..., cols], side="right")
    np.minimum(out, q - 1, out=out)
    return out


class RankSampler:
    """Draws list positions for a few vertices at a time, with the CDFs built once.

    Same inversion rule as ``sample_ranks``; meant for the small, repeated
    draws of the resampling loop.
    """

    def __init__(self, h: KPartiteHypergraph, q: int, distribution: Distribution = Distribution.TILTED):
        self.q = q
        cdfs = [c.tolist() for c in _rank_cdfs(h, q, distribution)]
        bounds = h.offsets[1:h.k]
        self._cdf_of = [cdfs[bisect.bisect_right(bounds, g)] for g in range(h.offsets[h.k - 1])]

    def __call__(self, rng: np.random.Generator, gids) -> list[int]:
        u = rng.random(len(gids)).tolist()
        top = self.q - 1
        return [min(bisect.bisect_right(self._cdf_of[g], x), top) for g, x in zip(gids, u)]


def sample_partial(h: KPartiteHypergraph, L: ListAssignment | np.ndarray, q: int, rng_seed,
                   distribution: Distribution = Distribution.TILTED) -> PartialColoring:
    """Color V_1..V_{k-1} independently; V_k stays uncolored."""
    if q < 2:
        raise ValueError("q must be >= 2")
    A = L if isinstance(L, np.ndarray) else L.array(h)
    if A.shape[1] != q:
        raise ValueError(f"lists have size {A.shape[1]}, expected {q}")
    rng = _as_rng(rng_seed)
    ncol = h.offsets[h.k - 1]
    ranks = sample_ranks(h, q, rng, distribution=distribution)
    colors = np.full(h.num_vertices, -1, dtype=np.int64)
    colors[:ncol] = A[np.arange(ncol), ranks]
    return PartialColoring(h, colors)


def sample_partial_batch(h: KPartiteHypergraph, A: np.ndarray, q: int, trials: int, rng: np.random.Generator,
                         distribution: Distribution = Distribution.TILTED) -> np.ndarray:
    """(trials, |V_1..V_{k-1}|) matrix of sampled colors."""
    ncol = h.offsets[h.k - 1]
    ranks = sample_ranks(h, q, rng, size=trials, distribution=distribution)
    return A[np.arange(ncol)[None, :], ranks]


# -- edge status and blocking ---------------------------------------------


def edge_status(e: Edge, phi: PartialColoring):
    """Common color of the first k-1 members of ``e``, or ``STAR``."""
    cols = []
    for u in e[:-1]:
        c = phi[u]
        if c is None:
            raise ValueError(f"member {u} of edge is uncolored")
        cols.append(c)
    return cols[0] if all(c == cols[0] for c in cols) else STAR


def edge_statuses(h: KPartiteHypergraph, colors: np.ndarray) -> np.ndarray:
    """Vectorized edge status: color, or -1 for STAR.

    ``colors`` is indexed by global id on its last axis and may carry leading
    batch dimensions.
    """
    if h.num_edges == 0:
        return np.empty(colors.shape[:-1] + (0,), dtype=np.int64)
    ea = h.edge_array
    first = colors[..., ea[:, 0]]
    agree = np.ones(first.shape, dtype=bool)
    for j in range(1, h.k - 1):
        agree &= colors[..., ea[:, j]] == first
    return np.where(agree, first, -1)


def blocked_matrix(h: KPartiteHypergraph, A: np.ndarray, colors: np.ndarray) -> np.ndarray:
    """(|V_k|, q) flags: color at list position s of the j-th V_k vertex is blocked."""
    off = h.offsets[h.k - 1]
    nk = h.part_sizes[-1]
    q = A.shape[1]
    out = np.zeros((nk, q), dtype=bool)
    if h.num_edges == 0:
        return out
    status = edge_statuses(h, colors)
    vk = h.edge_array[:, -1]
    hit = A[vk] == status[:, None]  # (m, q); STAR (-1) never matches a color
    rows, cols = np.nonzero(hit)
    out[vk[rows] - off, cols] = True
    return out


@dataclass
class BlockReport:
    vertex: VertexId
    blocked_colors: dict[int, bool]
    blocked: bool


def block_report(h: KPartiteHypergraph, L: Mapping[VertexId, ColorList], phi: PartialColoring,
                 v: VertexId) -> BlockReport:
    _require_last_part(h, v)
    hit = set()
    for e in h.incident_edges(v):
        s = edge_status(e, phi)
        if s is not STAR:
            hit.add(s)
    flags = {c: c in hit for c in L[v]}
    return BlockReport(v, flags, all(flags.values()))

