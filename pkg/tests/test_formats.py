from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from kchroma.formats import (
    ParseError,
    parse_coloring_text,
    parse_instance,
    parse_instance_text,
    parse_lists_text,
    write_coloring,
    write_instance,
    write_lists,
)
from kchroma.generators import adversarial_lists, complete_kpartite, random_kpartite, tiny_corpus
from kchroma.lists import ListAssignment


@given(st.integers(2, 4), st.integers(1, 4), st.floats(0, 1), st.integers(0, 10 ** 6))
def test_instance_round_trip(k, n, p, seed):
    h = random_kpartite(k, n, p, seed)
    text = write_instance(h)
    h2 = parse_instance_text(text)
    assert h2 == h and write_instance(h2) == text


def test_corpus_files_round_trip(tmp_path):
    for it in tiny_corpus():
        inst, lists = tmp_path / f"{it.name}.khg", tmp_path / f"{it.name}.lists"
        inst.write_text(write_instance(it.h))
        lists.write_text(write_lists(it.lists, it.h))
        h, L = parse_instance(inst, lists)
        assert write_instance(h) == inst.read_text()
        assert write_lists(L, h) == lists.read_text()
        assert L == it.lists


def test_comments_and_blank_lines_ignored():
    text = "# demo\nkhg 2 1 1 1\n\n# edge\n1:0 2:0\n"
    assert parse_instance_text(text).num_edges == 1


def test_edge_count_mismatch_line():
    h = complete_kpartite(3, 2)
    lines = write_instance(h).splitlines()
    text = "\n".join(lines[:-1]) + "\n"  # header says 8, seven edge lines follow
    with pytest.raises(ParseError, match="edge count mismatch at line 9"):
        parse_instance_text(text)


def test_extra_edge_reports_its_line():
    with pytest.raises(ParseError, match="edge count mismatch at line 3"):
        parse_instance_text("khg 2 1 2 1\n1:0 2:0\n1:0 2:1\n")


def test_part_out_of_range():
    with pytest.raises(ParseError, match="part out of range"):
        parse_instance_text("khg 3 2 2 2 1\n1:0 2:0 4:0\n")


@pytest.mark.parametrize("text,msg", [
    ("khg 2 1 1 1\n1:0 2:5\n", "index out of range at line 2"),
    ("khg 2 1 1 1\n1:0 1:0\n", "edge not transversal"),
    ("khg 2 1 1 2\n1:0 2:0\n1:0 2:0\n", "duplicate edge"),
    ("khg 2 1 1 1\n1:0\n", "expected 2"),
    ("kgh 2 1 1 1\n", "header"),
    ("khg 2 1 x 0\n", "bad part size"),
    ("khg 2 1 1 1\n1-0 2:0\n", "bad vertex token"),
    ("", "missing header"),
])
def test_malformed_instances(text, msg):
    with pytest.raises(ParseError, match=msg):
        parse_instance_text(text)


def test_lists_uniform_directive():
    h = complete_kpartite(2, 2)
    L = parse_lists_text("uniform 3\n", h)
    assert L == ListAssignment.uniform(h, 3)
    assert write_lists(L, h) == "uniform 3\n"
    M = parse_lists_text("uniform 2\n1:0 4 5\n", h)
    assert M[h.vertices()[0]] == (4, 5) and M[h.vertices()[1]] == (0, 1)


@pytest.mark.parametrize("text,msg", [
    ("1:0 0 1\n", "no list for 3 vertices"),
    ("1:0 1 0\n", "ascending"),
    ("uniform 2\n1:0 0 1\n1:0 0 2\n", "second list"),
    ("uniform 2\nuniform 3\n", "single 'uniform"),
    ("uniform 2\n1:0\n", "empty list"),
    ("uniform 2\n3:0 1 2\n", "part out of range"),
])
def test_malformed_lists(text, msg):
    with pytest.raises(ParseError, match=msg):
        parse_lists_text(text, complete_kpartite(2, 2))


def test_coloring_round_trip():
    h = complete_kpartite(2, 2)
    col = {v: i for i, v in enumerate(h.vertices())}
    text = write_coloring(col, h)
    assert text.splitlines()[0] == "1:0 0"
    assert parse_coloring_text(text, h) == col


def test_random_lists_round_trip():
    h = random_kpartite(3, 3, 0.5, 1)
    L = adversarial_lists(h, 4, "RANDOM_WINDOWED", 6)
    text = write_lists(L, h)
    assert parse_lists_text(text, h) == L and write_lists(parse_lists_text(text, h), h) == text
