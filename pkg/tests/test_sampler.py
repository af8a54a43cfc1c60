from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kchroma.generators import adversarial_lists, complete_kpartite, random_kpartite
from kchroma.hypergraph import KPartiteHypergraph, VertexId
from kchroma.lists import ListAssignment, common_list
from kchroma.sampler import (
    STAR,
    Distribution,
    PartialColoring,
    RankSampler,
    block_report,
    blocked_matrix,
    edge_status,
    edge_statuses,
    index_probabilities,
    make_rng,
    problematic_prob,
    rho,
    rho_vector,
    sample_partial,
    sample_ranks,
    tilted_prob,
)


def V(p, i):
    return VertexId(p, i)


def test_tilted_examples():
    L = (1, 2, 3, 4, 5)
    assert tilted_prob(1, L, 1, 5, 3) == Fraction(17, 55)
    assert tilted_prob(1, L, 5, 5, 3) == Fraction(5, 55)
    assert tilted_prob(2, L, 4, 5, 3) == Fraction(1, 5)


def test_tilted_rejects_bad_input():
    with pytest.raises(ValueError):
        tilted_prob(1, (0,), 0, 1, 2)
    with pytest.raises(ValueError):
        tilted_prob(3, (0, 1), 0, 2, 3)  # V_k is never sampled
    with pytest.raises(ValueError):
        tilted_prob(1, (0, 1), 5, 2, 2)
    with pytest.raises(ValueError):
        tilted_prob(1, (0, 1, 2), 0, 2, 2)


@given(st.integers(2, 60), st.integers(0, 10 ** 6))
def test_tilted_sums_to_one(q, seed):
    L = tuple(sorted(make_rng(seed).choice(5 * q, size=q, replace=False).tolist()))
    assert sum(tilted_prob(1, L, c, q, 2) for c in L) == 1
    assert abs(index_probabilities(q).sum() - 1) < 1e-12
    # the float table agrees with the exact values
    exact = [float(tilted_prob(1, L, c, q, 2)) for c in L]
    assert np.allclose(index_probabilities(q), exact, rtol=0, atol=1e-15)


def test_tilted_is_decreasing_and_positive():
    for q in range(2, 40):
        p = index_probabilities(q)
        assert (np.diff(p) < 0).all() and (p > 0).all()


def test_problematic_prob_zero_off_common_list():
    e = (V(1, 0), V(2, 0))
    L = ListAssignment({e[0]: (0, 1), e[1]: (2, 3)})
    assert problematic_prob(e, 0, L, 2) == 0


def test_problematic_prob_k2_first_index():
    e = (V(1, 0), V(2, 0))
    L = ListAssignment({e[0]: (0, 1, 2, 3, 4), e[1]: (0, 1, 2, 3, 4)})
    assert problematic_prob(e, 0, L, 5) == Fraction(17, 55)


@given(st.integers(2, 4), st.integers(2, 5), st.integers(0, 10 ** 6))
def test_problematic_prob_is_product_of_marginals(k, q, seed):
    rng = make_rng(seed)
    e = tuple(V(p, 0) for p in range(1, k + 1))
    L = ListAssignment({v: rng.choice(2 * q, size=q, replace=False) for v in e})
    for c in range(2 * q):
        prod = Fraction(1)
        for u in e[:-1]:
            prod *= tilted_prob(u.part, L[u], c, q, k) if c in L[u] else 0
        if c in common_list(L, e):
            assert problematic_prob(e, c, L, q) == prod
        else:
            assert problematic_prob(e, c, L, q) == 0


def test_uniform_all_probability():
    e = (V(1, 0), V(2, 0), V(3, 0))
    L = ListAssignment({v: (0, 1, 2) for v in e})
    assert problematic_prob(e, 0, L, 3, Distribution.UNIFORM_ALL) == Fraction(1, 9)


def test_rho_examples():
    h = KPartiteHypergraph([1, 2], [(V(1, 0), V(2, 0))])
    L = ListAssignment.uniform(h, 5)
    assert rho(h, L, 5, V(2, 1), 0) == 0
    assert rho(h, L, 5, V(2, 0), 0) == Fraction(17, 55)


@given(st.integers(2, 3), st.integers(1, 4), st.floats(0.2, 1), st.integers(2, 4), st.integers(0, 10 ** 6))
def test_rho_vector_matches_exact(k, n, p, q, seed):
    h = random_kpartite(k, n, p, seed)
    L = adversarial_lists(h, q, "RANDOM_WINDOWED", seed)
    A = L.array(h)
    for dist in Distribution:
        for v in h.vertices(k):
            exact = [float(rho(h, L, q, v, c, dist)) for c in L[v]]
            assert np.allclose(rho_vector(h, A, q, v, dist), exact, atol=1e-12)


def test_rho_matches_monte_carlo_count():
    h = random_kpartite(3, 4, 0.6, 5)
    q = 3
    L = adversarial_lists(h, q, "RANDOM_WINDOWED", 9)
    A = L.array(h)
    v = max(h.vertices(3), key=h.degree)
    c = L[v][0]
    edges = np.array(list(h.incidence[h.gid(v)]))
    trials = 200000
    ranks = sample_ranks(h, q, make_rng(77), size=trials)
    ncol = h.offsets[2]
    colors = np.full((trials, h.num_vertices), -1)
    colors[:, :ncol] = A[np.arange(ncol)[None, :], ranks]
    counts = (edge_statuses(h, colors)[:, edges] == c).sum(axis=1)
    exact = float(rho(h, L, q, v, c))
    se = counts.std(ddof=1) / np.sqrt(trials)
    assert abs(counts.mean() - exact) <= 3 * se


def _phi(h, values):
    colors = np.full(h.num_vertices, -1, dtype=np.int64)
    for v, c in values.items():
        colors[h.gid(v)] = c
    return PartialColoring(h, colors)


def test_edge_status_examples():
    h3 = KPartiteHypergraph([1, 1, 1], [(V(1, 0), V(2, 0), V(3, 0))])
    e = h3.edges[0]
    assert edge_status(e, _phi(h3, {V(1, 0): 7, V(2, 0): 7})) == 7
    assert edge_status(e, _phi(h3, {V(1, 0): 7, V(2, 0): 8})) is STAR
    h2 = KPartiteHypergraph([1, 1], [(V(1, 0), V(2, 0))])
    assert edge_status(h2.edges[0], _phi(h2, {V(1, 0): 3})) == 3


def test_blocking_examples():
    h = KPartiteHypergraph([1, 2], [(V(1, 0), V(2, 0))])
    L = ListAssignment.uniform(h, 3)
    phi = _phi(h, {V(1, 0): 2})
    rep = block_report(h, L, phi, V(2, 0))
    assert rep.blocked_colors == {0: False, 1: False, 2: True} and not rep.blocked
    assert not any(block_report(h, L, phi, V(2, 1)).blocked_colors.values())


def test_crafted_block():
    # q edges at v, one per color, every edge agreeing on its color
    q = 3
    h = KPartiteHypergraph([q, q, 1], [(V(1, i), V(2, i), V(3, 0)) for i in range(q)])
    L = ListAssignment.uniform(h, q)
    phi = _phi(h, {**{V(1, i): i for i in range(q)}, **{V(2, i): i for i in range(q)}})
    assert block_report(h, L, phi, V(3, 0)).blocked
    assert blocked_matrix(h, L.array(h), phi.colors).all()


@given(st.integers(2, 3), st.integers(1, 4), st.floats(0, 1), st.integers(2, 4), st.integers(0, 10 ** 6))
def test_blocked_matrix_matches_reports(k, n, p, q, seed):
    h = random_kpartite(k, n, p, seed)
    L = adversarial_lists(h, q, "RANDOM_WINDOWED", seed)
    phi = sample_partial(h, L, q, seed)
    bm = blocked_matrix(h, L.array(h), phi.colors)
    for j, v in enumerate(h.vertices(k)):
        rep = block_report(h, L, phi, v)
        assert list(bm[j]) == [rep.blocked_colors[c] for c in L[v]]
        if h.degree(v) < q:
            assert not rep.blocked


def test_edge_statuses_batch_matches_single():
    h = random_kpartite(3, 3, 0.7, 2)
    L = adversarial_lists(h, 2, "IDENTICAL")
    phis = [sample_partial(h, L, 2, s) for s in range(5)]
    batch = edge_statuses(h, np.stack([p.colors for p in phis]))
    for row, phi in zip(batch, phis):
        single = [edge_status(e, phi) for e in h.edges]
        assert list(row) == [-1 if s is STAR else s for s in single]


def test_sample_partial_contract():
    h = complete_kpartite(3, 3)
    L = adversarial_lists(h, 4, "RANDOM_WINDOWED", 3)
    phi = sample_partial(h, L, 4, 12)
    for v in h.vertices():
        if v.part == 3:
            assert phi[v] is None
        else:
            assert phi[v] in L[v]
    again = sample_partial(h, L, 4, 12)
    assert np.array_equal(phi.colors, again.colors)
    with pytest.raises(ValueError):
        sample_partial(h, ListAssignment.uniform(h, 1), 1, 0)


def test_rank_sampler_matches_vectorised_draws():
    h = complete_kpartite(3, 4)
    gids = [0, 3, 5, 7]
    for dist in Distribution:
        a = RankSampler(h, 6, dist)(make_rng(4, 2), gids)
        b = sample_ranks(h, 6, make_rng(4, 2), distribution=dist, gids=np.array(gids))
        assert a == b.tolist()


def test_streams_are_independent_of_each_other():
    x = make_rng(1, 0).random(4)
    y = make_rng(1, 1).random(4)
    assert not np.allclose(x, y)
    assert np.array_equal(make_rng(1, 0).random(4), x)
