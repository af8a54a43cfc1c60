"""Threshold formulas, L* selection and the deterministic bound checks.

Logarithms are natural.  Functions that must work for astronomically large
max degrees (the local-lemma certificate and the regime search) take the
degree as a Python int and evaluate with mpmath at a precision matched to
the number of digits of the degree.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .hypergraph import KPartiteHypergraph, VertexId, max_degree
from .lists import ListAssignment
from .sampler import Distribution, rho_vector

A_TILTED = Fraction(4, 5)


class InadmissibleParameters(ValueError):
    pass


def p_value(k: int, q) -> Fraction:
    """Largest possible P[phi_e = c]: the tilted weight of rank 1 times q^-(k-2)."""
    q = Fraction(q)
    if q < 2:
        raise InadmissibleParameters("q must be >= 2")
    return Fraction(8, 5) / (q ** (k - 1) * (1 - Fraction(3, 5) / q)) * (1 - Fraction(3, 4) / q)


def p_float(k: int, q: float) -> float:
    """Floating p for real q; ``q**(k-1) * p`` is ``2(4q-3)/(5q-3)``."""
    if q <= 0.6:
        raise InadmissibleParameters(f"q={q} must exceed 3/5")
    return _pq(q) / q ** (k - 1)


def _pq(q: float) -> float:
    # q^(k-1) * p, bounded by 8/5 for q >= 1
    if q > 1e300:
        return 1.6
    return 2.0 * (4.0 * q - 3.0) / (5.0 * q - 3.0)


def _check_delta(delta) -> None:
    if delta <= 1:
        raise InadmissibleParameters(f"delta={delta} must exceed 1 (log delta must be positive)")


def log_q_threshold(k: int, delta, epsilon: float, factor: float = 0.8) -> float:
    _check_delta(delta)
    ld = math.log(delta)
    return (math.log(factor * (k - 1 + epsilon)) + ld - math.log(ld)) / (k - 1)


def q_threshold(k: int, delta, epsilon: float) -> float:
    """((4/5)(k-1+eps) delta / log delta)^(1/(k-1))."""
    return math.exp(log_q_threshold(k, delta, epsilon))


def q_uniform_threshold(k: int, delta, epsilon: float) -> float:
    """((k-1+eps) delta / log delta)^(1/(k-1)), the bound for all-uniform sampling."""
    return math.exp(log_q_threshold(k, delta, epsilon, factor=1.0))


def log_q_proposition(k: int, delta, gamma: float, a: float = 0.8, tol: float = 1e-9, max_iter: int = 100) -> float:
    """log of the fixed point q = ((k-1)(a+2 gamma)/(1-p(k,q)) * delta/log delta)^(1/(k-1)).

    Multiplying out, q^(k-1) = B + q^(k-1) p(k,q) with B = (k-1)(a+2 gamma) delta/log delta,
    and q^(k-1) p is a slowly varying function of q, so iterating in that form
    contracts.
    """
    _check_delta(delta)
    ld = math.log(delta)
    log_b = math.log((k - 1) * (a + 2 * gamma)) + ld - math.log(ld)
    lq = log_b / (k - 1)
    for _ in range(max_iter):
        q = math.exp(lq) if lq < 700 else math.inf
        if q <= 0.6:
            raise InadmissibleParameters(f"iterate q={q} is not above 3/5")
        ratio = _pq(q) * math.exp(-log_b) if log_b < 700 else 0.0
        new = (log_b + math.log1p(ratio)) / (k - 1)
        if abs(new - lq) <= tol * 1e-2:
            return new
        lq = new
    raise InadmissibleParameters("fixed point iteration did not converge in %d steps" % max_iter)


def q_proposition(k: int, delta, gamma: float, a: float = 0.8) -> float:
    q = math.exp(log_q_proposition(k, delta, gamma, a))
    return q


def q_proposition_residual(k: int, delta, gamma: float, a: float, q: float) -> float:
    """Relative residual of q against the defining equation."""
    rhs = ((k - 1) * (a + 2 * gamma) / (1 - p_float(k, q)) * delta / math.log(delta)) ** (1 / (k - 1))
    return abs(rhs - q) / q


@dataclass
class ThresholdParams:
    k: int
    delta: int
    epsilon: float
    q: int
    gamma: float = field(init=False)
    a: Fraction = field(init=False, default=A_TILTED)
    p: Fraction = field(init=False)

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise InadmissibleParameters("epsilon must lie in (0, 1)")
        self.gamma = self.epsilon / (4 * self.k)
        self.p = p_value(self.k, self.q)

    @classmethod
    def admissible(cls, k: int, delta: int, epsilon: float) -> "ThresholdParams":
        """Parameters with q the ceiling of the fixed-point q."""
        gamma = epsilon / (4 * k)
        q = max(2, math.ceil(q_proposition(k, delta, gamma, float(A_TILTED))))
        return cls(k, delta, epsilon, q)

    @property
    def existence_rhs(self) -> float:
        """delta (a + gamma) / q^(k-1)."""
        return self.delta * (float(self.a) + self.gamma) / self.q ** (self.k - 1)

    @property
    def q_prop(self) -> float:
        return q_proposition(self.k, max(self.delta, 2), self.gamma, float(self.a))


# -- L* selection ----------------------------------------------------------


class Regime(str, enum.Enum):
    LOW_Z = "LOW_Z"
    HIGH_Z = "HIGH_Z"


@dataclass
class LStarSelection:
    vertex: VertexId
    lstar: tuple[int, ...]
    regime: Regime
    z: Fraction
    avg_rho: float
    rho: np.ndarray  # rho(v, c) over the whole list of v, in list order
    common_sizes: np.ndarray  # |L_e| for each e in E(v)
    delta: int


def common_sizes(h: KPartiteHypergraph, A: np.ndarray, v: VertexId) -> np.ndarray:
    g = h.gid(v)
    inc = list(h.incidence[g])
    if not inc:
        return np.zeros(0, dtype=np.int64)
    members = h.edge_array[inc, : h.k - 1]
    eq = A[members][:, :, :, None] == A[g][None, None, None, :]
    return eq.any(axis=2).all(axis=1).sum(axis=1)


def select_lstar(h: KPartiteHypergraph, L: ListAssignment, q: int, gamma: float, v: VertexId,
                 *, A: np.ndarray | None = None, delta: int | None = None,
                 distribution: Distribution = Distribution.TILTED) -> LStarSelection:
    """Pick L* for ``v`` by the average common-list size z over E(v).

    z <= 2q/3 keeps the whole list; otherwise L* holds the colors of rank at
    least (1 - gamma) q.  z is normalised by the instance's max degree.
    """
    if A is None:
        A = L.array(h)
    if delta is None:
        delta = max_degree(h)
    sizes = common_sizes(h, A, v)
    total = int(sizes.sum())
    z = Fraction(total, delta) if delta else Fraction(0)
    rho = rho_vector(h, A, q, v, distribution)
    colors = A[h.gid(v)]
    if 3 * total <= 2 * q * delta:
        regime = Regime.LOW_Z
        mask = np.ones(q, dtype=bool)
    else:
        regime = Regime.HIGH_Z
        cutoff = (1 - Fraction(gamma)) * q
        mask = np.array([i + 1 >= cutoff for i in range(q)])
    if not mask.any():
        raise InadmissibleParameters("empty L*; gamma * q is too small")
    return LStarSelection(v, tuple(int(c) for c in colors[mask]), regime, z, float(rho[mask].mean()), rho, sizes, delta)


@dataclass
class BoundCheck:
    vertex: VertexId
    regime: Regime
    lhs: float
    rhs: float
    passed: bool
    size_ok: bool
    in_proven_regime: bool


def check_existence_bound(selection: LStarSelection, params: ThresholdParams) -> BoundCheck:
    """Average rho over L* against delta (a + gamma) / q^(k-1)."""
    rhs = params.existence_rhs
    lhs = selection.avg_rho
    size_ok = len(selection.lstar) >= params.gamma * params.q
    proven = params.q >= params.q_prop and params.delta >= regime_report(params.k, params.epsilon)["delta_min"]
    return BoundCheck(selection.vertex, selection.regime, lhs, rhs, lhs <= rhs and size_ok, size_ok, proven)


def low_z_upper_bound(k: int, q: int, delta: int, z) -> float:
    """(8/5)/(q^(k-1)(1-3/(5q))) * (z delta/q - 3 delta z^2/(8 q^2))."""
    z = float(z)
    c = 1.6 / (q ** (k - 1) * (1 - 3 / (5 * q)))
    return c * (z * delta / q - 3 * delta * z * z / (8 * q * q))


def blocked_prob_inner_bound(rho_values, p: float) -> float:
    """prod_c (1 - exp(-rho(v,c)/(1-p))), the product form of the blocking bound."""
    r = np.asarray(rho_values, dtype=np.float64)
    return float(np.prod(1.0 - np.exp(-r / (1.0 - p))))


def blocked_prob_bound(delta, gamma: float, k: int) -> float:
    """exp(-delta^(gamma/(3k)))."""
    return math.exp(-math.exp(gamma / (3 * k) * math.log(delta)))


# -- the local lemma certificate -------------------------------------------


@dataclass
class LLLCertificate:
    k: int
    delta: int
    epsilon: float
    log_p_lll: float
    d_lll: int
    log_value: float  # log(e p (d+1))
    holds: bool

    @property
    def p_lll(self) -> float:
        return math.exp(self.log_p_lll) if self.log_p_lll > -745 else 0.0


def _dps_for(delta) -> int:
    return max(30, len(str(int(delta))) + 30)


def _lll_log_value(k: int, delta: int, epsilon: float, log_p=None):
    with mpmath.workdps(_dps_for(delta)):
        D = mpmath.mpf(int(delta))
        lp = -mpmath.power(D, mpmath.mpf(epsilon) / (12 * k * k)) if log_p is None else mpmath.mpf(log_p)
        return 1 + lp + mpmath.log(k - 1) + 2 * mpmath.log(D), lp


def lll_certificate(k: int, delta: int, epsilon: float, blocked_prob_bound: float | None = None) -> LLLCertificate:
    """e * p_LLL * (d_LLL + 1) < 1 with p_LLL = exp(-delta^(eps/(12 k^2))), d_LLL = (k-1) delta^2 - 1.

    ``blocked_prob_bound`` replaces p_LLL when given.
    """
    log_p = None if blocked_prob_bound is None else math.log(blocked_prob_bound) if blocked_prob_bound > 0 else -math.inf
    if log_p == -math.inf:
        return LLLCertificate(k, delta, epsilon, -math.inf, (k - 1) * delta * delta - 1, -math.inf, True)
    val, lp = _lll_log_value(k, delta, epsilon, log_p)
    return LLLCertificate(k, int(delta), epsilon, float(lp), (k - 1) * int(delta) ** 2 - 1, float(val), bool(val < 0))


def q_condition(k: int, delta, epsilon: float) -> bool:
    """q_threshold(k, delta, eps) >= q_proposition(k, delta, eps/(4k), 4/5)."""
    return log_q_threshold(k, delta, epsilon) >= log_q_proposition(k, delta, epsilon / (4 * k), 0.8)


def _smallest_int(pred, lo: int) -> int:
    """Smallest integer n >= lo with pred(n), for pred monotone from lo on."""
    if pred(lo):
        return lo
    hi = lo * 2
    while not pred(hi):
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _lll_delta_min(k: int, epsilon: float) -> int:
    base = 1 + mpmath.log(k - 1)

    def g(x):
        return base + 2 * x - mpmath.exp(c * x)

    # g rises then falls; its last zero lies beyond the maximum at ln(2/c)/c
    with mpmath.workdps(30):
        c = mpmath.mpf(epsilon) / (12 * k * k)
        x_lo = mpmath.log(2 / c) / c
        x_hi = 2 * x_lo
        while g(x_hi) > 0:
            x_hi *= 2
        root = mpmath.findroot(g, (x_lo, x_hi), solver="anderson")
    digits = int(root / mpmath.log(10)) + 1
    with mpmath.workdps(digits + 40):
        c = mpmath.mpf(epsilon) / (12 * k * k)
        base = 1 + mpmath.log(k - 1)
        x = mpmath.mpf(root)
        for _ in range(60):
            step = g(x) / (2 - c * mpmath.exp(c * x))
            x -= step
            if abs(step) < mpmath.mpf(10) ** (-(digits + 30)):
                break
        guess = int(mpmath.floor(mpmath.exp(x)))

    def holds(d):
        return d >= 2 and _lll_log_value(k, d, epsilon)[0] < 0

    cand = max(2, guess - 2)
    while cand > 2 and holds(cand - 1):
        cand -= 1
    while not holds(cand):
        cand += 1
    return cand


_REGIME_CACHE: dict[tuple[int, float], dict] = {}


def regime_report(k: int, epsilon: float) -> dict:
    """Smallest max degree where both the threshold comparison and the LLL certificate hold."""
    key = (k, float(epsilon))
    if key in _REGIME_CACHE:
        return dict(_REGIME_CACHE[key])
    d_q = _smallest_int(lambda d: q_condition(k, d, epsilon), 3)
    d_lll = _lll_delta_min(k, epsilon)
    d0 = max(d_q, d_lll)
    half = d0 // 2
    applicable = half >= 3
    out = {
        "k": k,
        "epsilon": epsilon,
        "delta_min": d0,
        "log_delta_min": math.log(d0),
        "delta_min_q_condition": d_q,
        "delta_min_lll": d_lll,
        "q_condition_at_delta_min": q_condition(k, d0, epsilon),
        "lll_at_delta_min": lll_certificate(k, d0, epsilon).holds,
        "half_delta_checked": applicable,
        "q_condition_at_half": q_condition(k, half, epsilon) if applicable else None,
        "lll_at_half": lll_certificate(k, half, epsilon).holds if applicable else None,
    }
    _REGIME_CACHE[key] = out
    return dict(out)


def analyze(k: int, delta: int, epsilon: float) -> dict:
    """Every threshold value and certificate boolean for (k, delta, epsilon)."""
    gamma = epsilon / (4 * k)
    lqp = log_q_proposition(k, delta, gamma, 0.8)
    lqt = log_q_threshold(k, delta, epsilon)
    q_int = math.ceil(math.exp(lqp)) if lqp < 700 else None
    cert = lll_certificate(k, delta, epsilon)
    reg = regime_report(k, epsilon)
    with mpmath.workdps(30):
        qt = mpmath.exp(lqt)
        qp = mpmath.exp(lqp)
    return {
        "k": k,
        "delta": delta if delta < 2 ** 63 else str(delta),
        "epsilon": epsilon,
        "gamma": gamma,
        "a": 0.8,
        "q_threshold": float(qt),
        "q_uniform_threshold": math.exp(log_q_threshold(k, delta, epsilon, 1.0)) if lqt < 700 else math.inf,
        "q_proposition": float(qp),
        "q_list_size": q_int,
        "p": float(p_value(k, q_int)) if q_int is not None and q_int >= 2 else None,
        "q_condition": lqt >= lqp,
        "blocked_prob_bound": blocked_prob_bound(delta, gamma, k) if math.log(delta) < 1e5 else 0.0,
        "lll_log_p": cert.log_p_lll,
        "lll_d": cert.d_lll if cert.d_lll < 2 ** 63 else str(cert.d_lll),
        "lll_log_value": cert.log_value,
        "lll_certificate": cert.holds,
        "regime": {**reg, "delta_min": _jsonable_int(reg["delta_min"]),
                   "delta_min_lll": _jsonable_int(reg["delta_min_lll"])},
        "in_proven_regime": bool(lqt >= lqp and cert.holds and delta >= reg["delta_min"]),
    }


def _jsonable_int(n: int):
    return n if n < 2 ** 63 else str(n)
