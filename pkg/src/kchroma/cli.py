"""Command-line front end.

Exit codes: 0 when every requested operation completed and no checked
invariant failed, 1 when an operation did not complete (budget exhausted,
invalid coloring, oracle guard hit), 2 for bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import analysis, generators, oracle
from .experiment import ExperimentSpec, compare_distributions, default_threads, run_rows, to_csv
from .formats import (ParseError, parse_instance, read_coloring, read_lists, write_coloring, write_instance,
                      write_lists)
from .hypergraph import InvalidHypergraphError, VertexId, max_degree, validate
from .lists import InsufficientListError, ListAssignment, normalize_lists
from .sampler import Distribution
from .solver import Status, solve, verify

OK, INCOMPLETE, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _vertex(tok: str) -> VertexId:
    p, sep, i = tok.partition(":")
    if not sep:
        raise InputError(f"vertex must look like part:index, got {tok!r}")
    return VertexId(int(p), int(i))


def _load(args, need_lists: bool = True):
    h, _ = parse_instance(args.instance)
    L = None
    if getattr(args, "uniform_lists", None) is not None:
        L = ListAssignment.uniform(h, args.uniform_lists)
    elif getattr(args, "lists", None):
        L = read_lists(args.lists, h)
    elif need_lists:
        raise InputError("give --lists FILE or --uniform-lists Q")
    if L is not None:
        q = getattr(args, "q", None) or min(len(cs) for cs in L.values())
        L = normalize_lists(L, q)
    return h, L


# -- subcommands -------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.family == "complete":
        h = generators.complete_kpartite(args.k, args.n)
    elif args.family == "random":
        h = generators.random_kpartite(args.k, args.n, args.p, args.seed)
    else:
        degree = args.degree if args.degree is not None else args.n ** (args.k - 1) // 2
        h = generators.random_regular_kpartite(args.k, args.n, degree, args.seed)
    Path(args.out).write_text(write_instance(h))
    payload = {"schema": "kchroma-gen v1", "instance": args.out, "k": h.k, "part_sizes": list(h.part_sizes),
               "num_edges": h.num_edges, "max_degree": max_degree(h)}
    if args.lists_out:
        if args.q is None:
            raise InputError("--lists-out needs --q")
        L = generators.adversarial_lists(h, args.q, args.style, args.seed)
        Path(args.lists_out).write_text(write_lists(L, h))
        payload.update(lists=args.lists_out, q=args.q, style=args.style)
    _emit(args, payload, f"wrote {args.out}: k={h.k} edges={h.num_edges} max degree={payload['max_degree']}")
    return OK


def cmd_solve(args) -> int:
    h, L = _load(args)
    dist = Distribution(args.distribution)
    out = solve(h, L, L.q, args.budget, args.seed, dist, track=args.track)
    problems = verify(h, L, out.coloring) if out.coloring is not None else []
    payload = out.to_json()
    payload["verify_violations"] = problems
    if args.coloring_out and out.coloring is not None:
        Path(args.coloring_out).write_text(write_coloring(out.coloring, h))
    if not args.json_coloring:
        payload.pop("coloring")
    _emit(args, payload, f"{out.status.value}: {out.resamples} resamples, {out.initial_blocked} blocked initially"
          + ("" if not problems else f"; {len(problems)} violations"))
    return OK if out.status is Status.SUCCESS and not problems else INCOMPLETE


def cmd_analyze(args) -> int:
    if args.regime:
        reg = analysis.regime_report(args.k, args.eps)
        payload = {"schema": "kchroma-regime v1", **reg, "delta_min": analysis._jsonable_int(reg["delta_min"]),
                   "delta_min_lll": analysis._jsonable_int(reg["delta_min_lll"])}
        ok = reg["q_condition_at_delta_min"] and reg["lll_at_delta_min"]
        if reg["half_delta_checked"]:
            ok = ok and not (reg["q_condition_at_half"] and reg["lll_at_half"])
        text = (f"k={args.k} eps={args.eps}: smallest delta = e^{reg['log_delta_min']:.4f} "
                f"(q condition from {reg['delta_min_q_condition']}, certificate from e^{math.log(reg['delta_min_lll']):.4f})")
        _emit(args, payload, text)
        return OK if ok else INCOMPLETE
    if args.delta is None:
        raise InputError("give --delta or --regime")
    payload = {"schema": "kchroma-analyze v1", **analysis.analyze(args.k, args.delta, args.eps)}
    text = "\n".join(f"{k}: {v}" for k, v in payload.items() if k not in ("schema", "regime"))
    _emit(args, payload, text)
    return OK


def _estimate(args) -> int:
    h, L = _load(args)
    v = _vertex(args.vertex)
    dist = Distribution(args.distribution)
    b, per_color = oracle.estimate_blocking(h, L, L.q, v, args.trials, args.seed, dist)
    colors = {}
    for c, est in per_color.items():
        bound = float(oracle.color_blocked_product(h, L, L.q, v, c, dist))
        colors[str(c)] = {**est.to_json(), "product_bound": bound}
    payload = {"schema": "kchroma-estimate v1", "vertex": str(v), "distribution": dist.value,
               "block_prob": b.to_json(), "colors": colors}
    if oracle.is_star(h, v):
        payload["exact_block_prob"] = float(oracle.exact_block_prob_star(h, L, L.q, v, dist))
    _emit(args, payload, f"P[B_{v}] ~ {b.estimate:.6g} +- {b.stderr:.2g} ({b.trials} trials)")
    return OK


def cmd_estimate(args) -> int:
    return _estimate(args)


def cmd_oracle(args) -> int:
    if args.verb == "estimate":
        return _estimate(args)
    if args.verb == "colorable":
        h, L = _load(args)
        ok, witness = oracle.exhaustive_colorable(h, L)
        payload = {"schema": "kchroma-oracle v1", "verb": "colorable", "colorable": ok,
                   "witness": None if witness is None else {str(v): c for v, c in witness.items()}}
        _emit(args, payload, "colorable" if ok else "not colorable")
        return OK
    h, _ = parse_instance(args.instance)
    res = oracle.choice_number(h, args.max_q, args.universe)
    payload = {"schema": "kchroma-oracle v1", "verb": "choice-number", "choice_number": res.value,
               "max_q": args.max_q, "universe_size": res.universe_size, "exact": res.exact, "caveat": res.caveat,
               "front_assignments": res.assignments_examined,
               "bad_witness": None if res.witness is None else {str(v): list(cs) for v, cs in res.witness.items()}}
    value = res.value if res.value is not None else f"> {args.max_q}"
    _emit(args, payload, f"choice number {value} ({res.caveat})")
    return OK if res.value is not None else INCOMPLETE


def cmd_experiment(args) -> int:
    spec = ExperimentSpec.load(args.spec) if args.spec else ExperimentSpec()
    overrides = {
        "ks": args.k, "ns": args.n, "qs": args.q, "epsilons": args.eps, "seeds": args.seeds,
        "trials": args.trials, "generator": args.generator, "list_style": args.style,
        "distributions": args.distribution, "solve_runs": args.solve_runs, "output": args.out,
    }
    if args.seed is not None and args.seeds is None and not args.spec:
        overrides["seeds"] = [args.seed]
    d = spec.to_dict()
    d.update({k: v for k, v in overrides.items() if v is not None})
    spec = ExperimentSpec.from_dict(d)
    rows = run_rows(spec, args.threads)
    text = to_csv(rows)
    if spec.output:
        Path(spec.output).write_text(text)
    if args.json:
        print(json.dumps({"schema": "kchroma-experiment v1", "rows": len(rows), "output": spec.output,
                          "comparison": compare_distributions(rows)}, indent=2, sort_keys=True))
    elif not spec.output:
        sys.stdout.write(text)
    else:
        print(f"wrote {len(rows)} rows to {spec.output}")
    return OK


def cmd_verify(args) -> int:
    h, _ = parse_instance(args.instance)
    problems = validate(h)
    if args.coloring:
        _, L = _load(args)
        problems += verify(h, L, read_coloring(args.coloring, h))
    payload = {"schema": "kchroma-verify v1", "valid": not problems, "violations": problems}
    _emit(args, payload, "valid" if not problems else "\n".join(problems))
    return OK if not problems else INCOMPLETE


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed (default 0)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker threads (default from KCHROMA_THREADS, else 1)")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit JSON")

    p = argparse.ArgumentParser(prog="kchroma", parents=[common],
                                description="List coloring of k-partite k-uniform hypergraphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def lists_args(sp, required=True):
        g = sp.add_mutually_exclusive_group(required=required)
        g.add_argument("--lists", help="list file")
        g.add_argument("--uniform-lists", type=int, metavar="Q", help="lists {0..Q-1} everywhere")
        sp.add_argument("--q", type=int, help="truncate lists to their Q smallest colors (default: shortest list)")

    def dist_arg(sp):
        sp.add_argument("--distribution", choices=[d.value for d in Distribution], default="TILTED")

    g = sub.add_parser("gen", parents=[common], help="generate an instance (and lists)")
    g.add_argument("family", choices=["complete", "random", "regular"])
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--n", type=int, required=True, help="vertices per part")
    g.add_argument("--p", type=float, default=0.5, help="edge probability (random)")
    g.add_argument("--degree", type=int, help="degree (regular; default n^(k-1)//2)")
    g.add_argument("--out", required=True)
    g.add_argument("--lists-out")
    g.add_argument("--q", type=int)
    g.add_argument("--style", choices=[s.value for s in generators.ListStyle], default="IDENTICAL")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", parents=[common], help="run the sample-extend-resample solver")
    s.add_argument("instance")
    lists_args(s)
    s.add_argument("--budget", type=int, help="resample budget (default 100 |V_k|)")
    s.add_argument("--coloring-out", help="write 'part:index color' lines here")
    s.add_argument("--json-coloring", action="store_true", help="include the coloring in JSON output")
    s.add_argument("--track", action="store_true", help="record blocked counts after each resample")
    dist_arg(s)
    s.set_defaults(func=cmd_solve)

    a = sub.add_parser("analyze", parents=[common], help="thresholds and certificates")
    a.add_argument("--k", type=int, required=True)
    a.add_argument("--delta", type=int)
    a.add_argument("--eps", type=float, required=True)
    a.add_argument("--regime", action="store_true", help="report the smallest delta of the proven regime")
    a.set_defaults(func=cmd_analyze)

    def estimate_args(sp):
        sp.add_argument("instance")
        lists_args(sp)
        sp.add_argument("--vertex", required=True, help="V_k vertex as part:index")
        sp.add_argument("--trials", type=int, default=100000)
        dist_arg(sp)

    e = sub.add_parser("estimate", parents=[common], help="Monte Carlo blocking probabilities")
    estimate_args(e)
    e.set_defaults(func=cmd_estimate)

    o = sub.add_parser("oracle", parents=[common], help="exhaustive ground truth")
    ov = o.add_subparsers(dest="verb", required=True)
    oc = ov.add_parser("colorable", parents=[common])
    oc.add_argument("instance")
    lists_args(oc)
    ch = ov.add_parser("choice-number", parents=[common])
    ch.add_argument("instance")
    ch.add_argument("--max-q", type=int, default=4)
    ch.add_argument("--universe", type=int, help="color universe size (default q |V|)")
    oe = ov.add_parser("estimate", parents=[common])
    estimate_args(oe)
    o.set_defaults(func=cmd_oracle)

    x = sub.add_parser("experiment", parents=[common], help="batch sweep with CSV report")
    x.add_argument("spec", nargs="?", help="JSON experiment spec; flags below override it")
    x.add_argument("--k", type=int, nargs="+")
    x.add_argument("--n", type=int, nargs="+")
    x.add_argument("--q", type=int, nargs="+")
    x.add_argument("--eps", type=float, nargs="+")
    x.add_argument("--seeds", type=int, nargs="+")
    x.add_argument("--trials", type=int)
    x.add_argument("--solve-runs", type=int)
    x.add_argument("--generator", choices=["complete", "random", "regular"])
    x.add_argument("--style", choices=[s.value for s in generators.ListStyle])
    x.add_argument("--distribution", nargs="+", choices=[d.value for d in Distribution])
    x.add_argument("--out", help="CSV output path (default stdout)")
    x.set_defaults(func=cmd_experiment)

    v = sub.add_parser("verify", parents=[common], help="validate an instance and optionally a coloring")
    v.add_argument("instance")
    v.add_argument("--coloring")
    lists_args(v, required=False)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    explicit_seed = getattr(args, "seed", None)
    args.json = getattr(args, "json", False)
    args.threads = getattr(args, "threads", None) or default_threads()
    args.seed = 0 if explicit_seed is None else explicit_seed
    if args.command == "experiment":
        args.seed = explicit_seed
    try:
        return args.func(args)
    except (InputError, ParseError, InvalidHypergraphError, InsufficientListError, ValueError, OSError) as exc:
        print(f"kchroma: error: {exc}", file=sys.stderr)
        return BAD_INPUT
    except oracle.GuardExceeded as exc:
        print(f"kchroma: guard: {exc}", file=sys.stderr)
        return INCOMPLETE


if __name__ == "__main__":
    sys.exit(main())
