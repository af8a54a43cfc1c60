"""Text formats for instances, lists and colorings.

Instance::

    khg <k> <n1> ... <nk> <m>
    <part:index> ... <part:index>      (m lines, k tokens, ascending parts)

Lists::

    uniform <q>                        (optional default {0..q-1})
    <part:index> <c1> ... <cq>         (ascending colors; overrides the default)

Coloring::

    <part:index> <color>

Lines starting with ``#`` and blank lines are ignored.  Writers emit no
comments, so ``write(parse(text)) == text`` for writer output.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterator, Mapping

from .hypergraph import InvalidHypergraphError, KPartiteHypergraph, VertexId, validate
from .lists import ListAssignment


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, detail: str | None = None):
        self.line = line
        text = message if line is None else f"{message} at line {line}"
        super().__init__(text if detail is None else f"{text}: {detail}")


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for no, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if s and not s.startswith("#"):
            yield no, s.split()


def _int(tok: str, no: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"bad {what} {tok!r}", no) from None


def _vertex(tok: str, no: int, part_sizes) -> VertexId:
    p, sep, i = tok.partition(":")
    if not sep:
        raise ParseError(f"bad vertex token {tok!r}", no)
    part, index = _int(p, no, "part"), _int(i, no, "index")
    if not 1 <= part <= len(part_sizes):
        raise ParseError("part out of range", no, tok)
    if not 0 <= index < part_sizes[part - 1]:
        raise ParseError("index out of range", no, tok)
    return VertexId(part, index)


# -- instances -------------------------------------------------------------


def parse_instance_text(text: str) -> KPartiteHypergraph:
    rows = list(_lines(text))
    if not rows:
        raise ParseError("missing header", 1)
    no, head = rows[0]
    if head[0] != "khg" or len(head) < 4:
        raise ParseError("header must read 'khg <k> <n1> ... <nk> <m>'", no)
    k = _int(head[1], no, "k")
    if k < 2 or len(head) != k + 3:
        raise ParseError(f"header must list k={head[1]} part sizes and an edge count", no)
    sizes = [_int(t, no, "part size") for t in head[2:-1]]
    m = _int(head[-1], no, "edge count")
    if any(s < 0 for s in sizes) or m < 0:
        raise ParseError("negative size in header", no)
    body = rows[1:]
    if len(body) != m:
        at = body[m][0] if len(body) > m else len(text.splitlines()) + 1
        raise ParseError("edge count mismatch", at, f"header says {m}, found {len(body)}")
    edges = []
    seen: dict[tuple, int] = {}
    for no, toks in body:
        if len(toks) != k:
            raise ParseError(f"edge has {len(toks)} vertices, expected {k}", no)
        e = tuple(_vertex(t, no, sizes) for t in toks)
        if [v.part for v in e] != list(range(1, k + 1)):
            raise ParseError("edge not transversal (one vertex per part, ascending)", no)
        if e in seen:
            raise ParseError(f"duplicate edge (first at line {seen[e]})", no)
        seen[e] = no
        edges.append(e)
    h = KPartiteHypergraph(sizes, edges, check=False)
    problems = validate(h)
    if problems:
        raise InvalidHypergraphError(problems)
    return h


def write_instance(h: KPartiteHypergraph) -> str:
    out = [" ".join(["khg", str(h.k), *map(str, h.part_sizes), str(h.num_edges)])]
    out.extend(" ".join(str(v) for v in e) for e in h.edges)
    return "\n".join(out) + "\n"


# -- lists -----------------------------------------------------------------


def parse_lists_text(text: str, h: KPartiteHypergraph) -> ListAssignment:
    default = None
    lists: dict[VertexId, tuple[int, ...]] = {}
    for no, toks in _lines(text):
        if toks[0] == "uniform":
            if len(toks) != 2 or default is not None:
                raise ParseError("expected a single 'uniform <q>' directive", no)
            q = _int(toks[1], no, "q")
            if q < 1:
                raise ParseError("q must be >= 1", no)
            default = tuple(range(q))
            continue
        v = _vertex(toks[0], no, h.part_sizes)
        if v in lists:
            raise ParseError(f"second list for {v}", no)
        cs = [_int(t, no, "color") for t in toks[1:]]
        if not cs:
            raise ParseError(f"empty list for {v}", no)
        if any(c < 0 for c in cs) or any(a >= b for a, b in zip(cs, cs[1:])):
            raise ParseError("colors must be nonnegative and strictly ascending", no)
        lists[v] = tuple(cs)
    if default is not None:
        lists = {v: lists.get(v, default) for v in h.vertices()}
    missing = [v for v in h.vertices() if v not in lists]
    if missing:
        raise ParseError(f"no list for {len(missing)} vertices (first: {missing[0]})")
    return ListAssignment(lists)


def write_lists(L: ListAssignment, h: KPartiteHypergraph) -> str:
    if L.is_uniform() and len(L) == h.num_vertices:
        return f"uniform {L.q}\n"
    return "".join(f"{v} {' '.join(map(str, L[v]))}\n" for v in h.vertices())


# -- colorings -------------------------------------------------------------


def write_coloring(coloring: Mapping[VertexId, int], h: KPartiteHypergraph) -> str:
    return "".join(f"{v} {coloring[v]}\n" for v in h.vertices() if v in coloring)


def parse_coloring_text(text: str, h: KPartiteHypergraph) -> dict[VertexId, int]:
    out: dict[VertexId, int] = {}
    for no, toks in _lines(text):
        if len(toks) != 2:
            raise ParseError("expected '<part:index> <color>'", no)
        v = _vertex(toks[0], no, h.part_sizes)
        if v in out:
            raise ParseError(f"second color for {v}", no)
        out[v] = _int(toks[1], no, "color")
    return out


# -- files -----------------------------------------------------------------


def parse_instance(path, lists_path=None) -> tuple[KPartiteHypergraph, ListAssignment | None]:
    """Read an instance file and, optionally, a list file for it."""
    h = parse_instance_text(Path(path).read_text())
    L = None if lists_path is None else parse_lists_text(Path(lists_path).read_text(), h)
    return h, L


def read_lists(path, h: KPartiteHypergraph) -> ListAssignment:
    return parse_lists_text(Path(path).read_text(), h)


def read_coloring(path, h: KPartiteHypergraph) -> dict[VertexId, int]:
    return parse_coloring_text(Path(path).read_text(), h)
