from __future__ import annotations

import json
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from kchroma import analysis as An
from kchroma.generators import adversarial_lists, complete_kpartite, random_kpartite, random_regular_kpartite
from kchroma.hypergraph import KPartiteHypergraph, VertexId, max_degree
from kchroma.lists import common_list


def ref_p(k, q):
    return (8 / 5) / (q ** (k - 1) * (1 - 3 / (5 * q))) * (1 - 3 / (4 * q))


def ref_q_prop(k, delta, gamma, a=0.8):
    """Bisection on q - ((k-1)(a+2g)/(1-p) * D/lnD)^(1/(k-1)), increasing in q."""
    def f(q):
        return q - ((k - 1) * (a + 2 * gamma) / (1 - ref_p(k, q)) * delta / math.log(delta)) ** (1 / (k - 1))
    lo, hi = 1.0, 2.0
    while f(hi) < 0:
        hi *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if f(mid) < 0 else (lo, mid)
    return (lo + hi) / 2


def ref_lll(k, delta, eps):
    with mpmath.workdps(len(str(delta)) + 50):
        D = mpmath.mpf(delta)
        return mpmath.e * mpmath.exp(-D ** (mpmath.mpf(eps) / (12 * k * k))) * (k - 1) * D * D < 1


def test_p_value_examples():
    assert An.p_value(2, 5) == Fraction(17, 55)
    assert An.p_value(3, 5) == Fraction(17, 275)
    for k in (2, 3, 4):
        assert abs(An.p_float(k, 1000) * 1000 ** (k - 1) / 1.6 - 1) < 0.01
        assert float(An.p_value(k, 7)) == pytest.approx(ref_p(k, 7), rel=1e-14)


def test_q_threshold_example():
    # (4/5)(k-1+eps) delta / ln delta with k=2, eps=1/4, ln delta = 4
    assert An.q_threshold(2, math.e ** 4, 0.25) == pytest.approx(0.8 * 1.25 * math.e ** 4 / 4, rel=1e-12)
    assert An.q_threshold(2, math.e ** 4, 0.25) == pytest.approx(13.6495, abs=1e-4)


def test_q_threshold_linear_for_k2():
    for d in (10, 100, 1000):
        assert An.q_threshold(2, d, 0.3) == pytest.approx(0.8 * 1.3 * d / math.log(d))


def test_q_threshold_monotone_k3():
    vals = [An.q_threshold(3, d, 1e-6) for d in range(3, 2000)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_q_threshold_rejects_small_delta():
    with pytest.raises(An.InadmissibleParameters):
        An.q_threshold(2, 1, 0.5)


@given(st.integers(2, 4), st.integers(3, 10 ** 6), st.floats(0.01, 0.99))
def test_q_proposition_fixed_point(k, delta, eps):
    gamma = eps / (4 * k)
    q = An.q_proposition(k, delta, gamma)
    assert An.q_proposition_residual(k, delta, gamma, 0.8, q) < 1e-9
    assert q == pytest.approx(ref_q_prop(k, delta, gamma), rel=1e-9)
    # p > 0 pushes q above the p = 0 formula
    assert q >= ((k - 1) * (0.8 + 2 * gamma) * delta / math.log(delta)) ** (1 / (k - 1))


def test_q_proposition_huge_delta():
    d = 10 ** 700
    lq = An.log_q_proposition(3, d, 0.01)
    limit = (math.log(2 * 0.82) + math.log(d) - math.log(math.log(d))) / 2
    assert lq == pytest.approx(limit, abs=1e-9)


def test_threshold_params():
    P = An.ThresholdParams(3, 100, 0.5, 9)
    assert P.gamma == pytest.approx(0.5 / 12)
    assert P.a == Fraction(4, 5) and 0 < P.p < 1
    assert P.existence_rhs == pytest.approx(100 * (0.8 + 0.5 / 12) / 81)
    with pytest.raises(An.InadmissibleParameters):
        An.ThresholdParams(2, 10, 1.5, 3)


def test_lstar_identical_lists_high_z():
    h = complete_kpartite(3, 4)
    q, eps = 8, 0.5
    gamma = eps / 12
    L = adversarial_lists(h, q, "IDENTICAL")
    for v in h.vertices(3):
        s = An.select_lstar(h, L, q, gamma, v)
        assert s.z == q and s.regime is An.Regime.HIGH_Z
        top = [c for i, c in enumerate(L[v], start=1) if i >= (1 - gamma) * q]
        assert list(s.lstar) == top and len(s.lstar) >= gamma * q


def test_lstar_disjoint_lists_low_z():
    h = random_kpartite(2, 6, 0.5, 3)
    L = adversarial_lists(h, 5, "DISJOINT_PER_PART")
    for v in h.vertices(2):
        s = An.select_lstar(h, L, 5, 0.1, v)
        assert s.z == 0 and s.regime is An.Regime.LOW_Z and s.lstar == L[v]


@given(st.integers(2, 3), st.integers(2, 5), st.floats(0.2, 1), st.integers(2, 6), st.integers(0, 10 ** 6))
def test_z_matches_recount(k, n, p, q, seed):
    h = random_kpartite(k, n, p, seed)
    if max_degree(h) == 0:
        return
    L = adversarial_lists(h, q, "RANDOM_WINDOWED", seed)
    D = max_degree(h)
    for v in h.vertices(k):
        s = An.select_lstar(h, L, q, 0.1, v)
        total = sum(len(common_list(L, e)) for e in h.incident_edges(v))
        assert s.z == Fraction(total, D)
        assert (s.regime is An.Regime.LOW_Z) == (s.z <= Fraction(2 * q, 3))
        assert len(s.lstar) >= 0.1 * q


def test_bound_edgeless_vertex():
    h2 = KPartiteHypergraph([3, 4], [(VertexId(1, 0), VertexId(2, 0)), (VertexId(1, 1), VertexId(2, 0))])
    P = An.ThresholdParams.admissible(2, 2, 0.5)
    L = adversarial_lists(h2, P.q, "IDENTICAL")
    b = An.check_existence_bound(An.select_lstar(h2, L, P.q, P.gamma, VertexId(2, 3)), P)
    assert b.lhs == 0 and b.passed


def test_bound_identical_regular():
    for k, n, d in [(2, 60, 50), (3, 12, 100)]:
        h = random_regular_kpartite(k, n, d, 4)
        P = An.ThresholdParams.admissible(k, d, 0.5)
        L = adversarial_lists(h, P.q, "IDENTICAL")
        A = L.array(h)
        for v in h.vertices(k):
            b = An.check_existence_bound(An.select_lstar(h, L, P.q, P.gamma, v, A=A), P)
            assert b.passed and not b.in_proven_regime


def test_low_z_upper_bound_dominates():
    h = random_kpartite(2, 30, 0.5, 8)
    D = max_degree(h)
    P = An.ThresholdParams.admissible(2, D, 0.5)
    L = adversarial_lists(h, P.q, "RANDOM_WINDOWED", 1)
    for v in h.vertices(2):
        s = An.select_lstar(h, L, P.q, P.gamma, v)
        if s.regime is An.Regime.LOW_Z:
            assert s.avg_rho <= An.low_z_upper_bound(2, P.q, D, s.z) + 1e-12


def test_lll_examples():
    # at delta = 10^6, delta^(1/96) is about 1.155, so e p (d+1) is far above 1
    c = An.lll_certificate(2, 10 ** 6, 0.5)
    assert not c.holds and c.log_value > 20
    assert not An.lll_certificate(2, 10, 0.5).holds
    assert c.d_lll == 10 ** 12 - 1


def test_lll_monotone_sweep():
    for k, eps in [(2, 0.5), (3, 0.25)]:
        d0 = An.regime_report(k, eps)["delta_min_lll"]
        for f in (1, 2, 10, 10 ** 5):
            assert An.lll_certificate(k, d0 * f, eps).holds
        assert not An.lll_certificate(k, d0 - 1, eps).holds


# frozen from the search; the boundaries are re-derived independently below
REGIME_LOGS = {(2, 0.25): 1542.67, (2, 0.5): 694.8, (3, 0.25): 3868.1, (3, 0.5): 1764.6}
Q_CONDITION_FROM = {(2, 0.25): 44, (2, 0.5): 16, (3, 0.25): 53, (3, 0.5): 20}


@pytest.mark.parametrize("k,eps", sorted(REGIME_LOGS))
def test_regime_report(k, eps):
    r = An.regime_report(k, eps)
    assert r["log_delta_min"] == pytest.approx(REGIME_LOGS[(k, eps)], abs=0.1)
    assert r["delta_min_q_condition"] == Q_CONDITION_FROM[(k, eps)]
    d0 = r["delta_min"]
    assert ref_lll(k, d0, eps) and not ref_lll(k, d0 - 1, eps)
    dq = r["delta_min_q_condition"]
    # the q condition via the reference fixed point
    assert An.q_threshold(k, dq, eps) >= ref_q_prop(k, dq, eps / (4 * k))
    assert An.q_threshold(k, dq - 1, eps) < ref_q_prop(k, dq - 1, eps / (4 * k))
    assert r["q_condition_at_delta_min"] and r["lll_at_delta_min"]
    assert r["half_delta_checked"] and not r["lll_at_half"]


def test_q_condition_sweep_is_monotone():
    for k, eps in Q_CONDITION_FROM:
        flags = [An.q_condition(k, d, eps) for d in range(3, 3000)]
        first = flags.index(True)
        assert all(flags[first:]) and first + 3 == Q_CONDITION_FROM[(k, eps)]


def test_analyze_record_serialises():
    for delta in (100, 10 ** 800):
        rec = An.analyze(3, delta, 0.5)
        text = json.dumps(rec)
        assert "q_proposition" in rec and "lll_certificate" in rec
        assert json.loads(text)["regime"]["k"] == 3
    assert An.analyze(2, 10 ** 800, 0.5)["in_proven_regime"]
    assert not An.analyze(2, 1000, 0.5)["in_proven_regime"]


def test_blocked_prob_bound_values():
    assert An.blocked_prob_bound(10 ** 6, 0.05, 2) == pytest.approx(math.exp(-(10 ** 6) ** (0.05 / 6)))
    assert An.blocked_prob_inner_bound([0, 0], 0.1) == 0
