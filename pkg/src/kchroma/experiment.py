"""Batch sweeps with deterministic CSV reports.

Each axis point (k, n, q, epsilon, distribution, seed) becomes one CSV row.
Column prefixes keep the two kinds of numbers apart: ``meas_`` columns are
Monte Carlo measurements (each with its trial count and standard error),
``calc_`` columns come from the analysis formulas and the instance itself,
and ``flag_`` columns are regime booleans.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, generators
from .formats import parse_instance
from .hypergraph import KPartiteHypergraph, max_degree
from .lists import ListAssignment, normalize_lists
from .sampler import Distribution, edge_statuses, make_rng, sample_ranks
from .solver import Status, solve

CSV_SCHEMA = "# kchroma-csv v1"
THREADS_ENV = "KCHROMA_THREADS"
GENERATORS = ("complete", "random", "regular", "file")


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class ExperimentSpec:
    ks: list[int] = field(default_factory=lambda: [2])
    ns: list[int] = field(default_factory=lambda: [10])
    qs: list[int] = field(default_factory=list)  # empty: q = ceil of the fixed-point q for each epsilon
    epsilons: list[float] = field(default_factory=lambda: [0.5])
    trials: int = 1000
    seeds: list[int] = field(default_factory=lambda: [0])
    generator: str = "complete"
    p_edge: float = 0.5
    degree: int | None = None  # for the regular generator; default n^(k-1) // 2
    instance_path: str | None = None
    lists_path: str | None = None
    list_style: str = "IDENTICAL"
    distributions: list[str] = field(default_factory=lambda: ["TILTED", "UNIFORM_ALL"])
    solve_runs: int = 0
    budget: int | None = None
    output: str | None = None

    def __post_init__(self):
        for name in ("ks", "ns", "epsilons", "seeds", "distributions"):
            if not getattr(self, name):
                raise ValueError(f"axis {name} is empty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.solve_runs < 0:
            raise ValueError("solve_runs must be >= 0")
        if self.generator not in GENERATORS:
            raise ValueError(f"generator must be one of {', '.join(GENERATORS)}")
        if self.generator == "file" and not self.instance_path:
            raise ValueError("generator 'file' needs instance_path")
        self.distributions = [Distribution(d).value for d in self.distributions]
        generators.ListStyle(self.list_style)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown experiment fields: {', '.join(sorted(unknown))}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return asdict(self)

    def points(self) -> list[tuple]:
        qs = self.qs or [None]
        return list(itertools.product(self.ks, self.ns, qs, self.epsilons, self.distributions, self.seeds))


COLUMNS = [
    "k", "n", "q", "epsilon", "distribution", "seed", "generator", "list_style",
    "calc_num_vertices", "calc_num_edges", "calc_delta",
    "calc_q_threshold", "calc_q_uniform_threshold", "calc_q_proposition", "calc_p_value",
    "calc_existence_rhs", "calc_blocked_prob_bound",
    "flag_q_at_least_q_proposition", "flag_q_condition", "flag_in_proven_regime",
    "meas_trials", "meas_blocked_vertex_rate", "meas_blocked_vertex_rate_se",
    "meas_any_blocked_rate", "meas_any_blocked_rate_se",
    "meas_solve_runs", "meas_solve_success_rate", "meas_mean_resamples", "meas_mean_resamples_se",
]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "inf" if math.isinf(x) else f"{x:.10g}"
    return str(x)


def _instance(spec: ExperimentSpec, k: int, n: int, seed: int):
    if spec.generator == "file":
        return parse_instance(spec.instance_path, spec.lists_path)
    if spec.generator == "complete":
        return generators.complete_kpartite(k, n), None
    if spec.generator == "random":
        return generators.random_kpartite(k, n, spec.p_edge, seed), None
    degree = spec.degree if spec.degree is not None else n ** (k - 1) // 2
    return generators.random_regular_kpartite(k, n, degree, seed), None


def blocked_counts(h: KPartiteHypergraph, A: np.ndarray, q: int, trials: int, seed: int, stream: tuple,
                   distribution: Distribution) -> np.ndarray:
    """Number of blocked V_k vertices in each of ``trials`` independent samples."""
    out = np.zeros(trials, dtype=np.int64)
    if h.num_edges == 0:
        return out
    ea = h.edge_array
    order = np.argsort(ea[:, -1], kind="stable")
    vk = ea[order, -1]
    starts = np.concatenate([[0], np.nonzero(np.diff(vk))[0] + 1])
    lists_k = A[vk]  # (m, q) lists of the V_k member, in sorted edge order
    ncol = h.offsets[h.k - 1]
    chunk = max(1, (1 << 22) // (h.num_edges * q))
    done, c = 0, 0
    while done < trials:
        t = min(chunk, trials - done)
        ranks = sample_ranks(h, q, make_rng(seed, *stream, c), size=t, distribution=distribution)
        colors = np.full((t, h.num_vertices), -1, dtype=np.int64)
        colors[:, :ncol] = A[np.arange(ncol)[None, :], ranks]
        status = edge_statuses(h, colors)[:, order]  # (t, m)
        hit = lists_k[None, :, :] == status[:, :, None]  # (t, m, q)
        per_vertex = np.logical_or.reduceat(hit, starts, axis=1)  # (t, touched V_k vertices, q)
        out[done:done + t] = per_vertex.all(axis=2).sum(axis=1)
        done += t
        c += 1
    return out


def _se(values: np.ndarray) -> float:
    return float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else 0.0


def run_point(spec: ExperimentSpec, index: int, point: tuple) -> dict:
    k, n, q, eps, dist, seed = point
    h, file_lists = _instance(spec, k, n, seed)
    k = h.k
    delta = max_degree(h)
    gamma = eps / (4 * k)
    qprop = analysis.q_proposition(k, delta, gamma) if delta >= 2 else None
    if q is None:
        q = max(2, math.ceil(qprop)) if qprop is not None else 2
    if file_lists is not None:
        L = normalize_lists(file_lists, q)
    else:
        L = generators.adversarial_lists(h, q, spec.list_style, seed)
    A = L.array(h)
    row = {
        "k": k, "n": n if spec.generator != "file" else "", "q": q, "epsilon": eps, "distribution": dist,
        "seed": seed, "generator": spec.generator, "list_style": spec.list_style if file_lists is None else "FILE",
        "calc_num_vertices": h.num_vertices, "calc_num_edges": h.num_edges, "calc_delta": delta,
    }
    if delta >= 2:
        params = analysis.ThresholdParams(k, delta, eps, q)
        qcond = analysis.q_condition(k, delta, eps)
        row.update({
            "calc_q_threshold": analysis.q_threshold(k, delta, eps),
            "calc_q_uniform_threshold": analysis.q_uniform_threshold(k, delta, eps),
            "calc_q_proposition": qprop,
            "calc_p_value": float(analysis.p_value(k, q)),
            "calc_existence_rhs": params.existence_rhs,
            "calc_blocked_prob_bound": analysis.blocked_prob_bound(delta, gamma, k),
            "flag_q_at_least_q_proposition": q >= qprop,
            "flag_q_condition": qcond,
            "flag_in_proven_regime": bool(qcond and delta >= analysis.regime_report(k, eps)["delta_min"]),
        })
    distribution = Distribution(dist)
    counts = blocked_counts(h, A, q, spec.trials, seed, (index, 0), distribution)
    nk = h.part_sizes[-1]
    rate = counts / nk if nk else counts.astype(float)
    anyb = (counts > 0).astype(float)
    row.update({
        "meas_trials": spec.trials,
        "meas_blocked_vertex_rate": float(rate.mean()), "meas_blocked_vertex_rate_se": _se(rate),
        "meas_any_blocked_rate": float(anyb.mean()), "meas_any_blocked_rate_se": _se(anyb),
        "meas_solve_runs": spec.solve_runs,
    })
    if spec.solve_runs:
        resamples, wins = [], 0
        for r in range(spec.solve_runs):
            run_seed = int(np.random.SeedSequence(seed, spawn_key=(index, 1, r)).generate_state(1)[0])
            out = solve(h, L, q, spec.budget, run_seed, distribution)
            wins += out.status is Status.SUCCESS
            resamples.append(out.resamples)
        res = np.array(resamples, dtype=float)
        row.update({
            "meas_solve_success_rate": wins / spec.solve_runs,
            "meas_mean_resamples": float(res.mean()), "meas_mean_resamples_se": _se(res),
        })
    return row


def run_rows(spec: ExperimentSpec, threads: int | None = None) -> list[dict]:
    points = spec.points()
    threads = default_threads() if threads is None else max(1, threads)
    if threads == 1:
        return [run_point(spec, i, p) for i, p in enumerate(points)]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(lambda ip: run_point(spec, *ip), enumerate(points)))


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(CSV_SCHEMA + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in COLUMNS])
    return buf.getvalue()


def run_experiment(spec: ExperimentSpec, threads: int | None = None) -> str:
    """CSV report for ``spec``; also written to ``spec.output`` when set."""
    text = to_csv(run_rows(spec, threads))
    if spec.output:
        Path(spec.output).write_text(text)
    return text


def compare_distributions(rows: list[dict]) -> list[dict]:
    """TILTED vs UNIFORM_ALL blocked rates at matching points; descriptive only."""
    key_cols = ("k", "n", "q", "epsilon", "seed")
    by_key: dict[tuple, dict] = {}
    for r in rows:
        by_key.setdefault(tuple(r[c] for c in key_cols), {})[r["distribution"]] = r
    out = []
    for key, d in by_key.items():
        if {"TILTED", "UNIFORM_ALL"} <= set(d):
            t, u = d["TILTED"]["meas_blocked_vertex_rate"], d["UNIFORM_ALL"]["meas_blocked_vertex_rate"]
            lower = "TILTED" if t < u else "UNIFORM_ALL" if u < t else "tie"
            out.append({**dict(zip(key_cols, key)), "tilted_rate": t, "uniform_rate": u, "lower": lower})
    return out
