"""``sublinear-match``: estimators, benchmarks and verification suites, CSV on stdout.

Exit codes: 0 success, 1 precondition or check failure, 2 bad flags,
3 verification budget exhausted.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from pathlib import Path

import numpy as np

from .estimators import (Constants, list_additive_run, list_multiplicative_run, matrix_additive_run,
                         race_instances)
from .graph import EdgeListError, Graph, dump_edge_list, gen_complete_bipartite, gen_gnp, gen_structured, \
    load_edge_list, stats
from .ranks import ExplicitRanks, IntervalLadder
from .reference import BudgetError, exact_maximum_matching, exact_min_vertex_cover, parallel_rounds
from .rng import derive_seed

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
AUTO_EXACT_MAX_N = 20

ESTIMATE_COLUMNS = [
    "graph", "n", "m", "dbar", "max_degree", "model", "mode", "eps", "seed", "race", "winner",
    "samples", "f", "mu_tilde", "nu_tilde", "raw_mu", "raw_nu", "degree_queries",
    "neighbor_queries", "pair_queries", "total_queries", "oracle_calls", "max_path", "mu", "nu",
]
QUERY_COLUMNS = [
    "graph", "n", "m", "dbar", "max_degree", "seed", "trials", "mean_T", "p50_T", "p90_T", "p99_T",
    "max_T", "ratio", "mean_max_path", "mean_queries",
]
QUERY_TRIAL_COLUMNS = ["graph", "n", "m", "dbar", "max_degree", "seed", "trial", "vertex", "matched",
                       "T", "max_path", "queries"]
ROUND_COLUMNS = ["graph", "n", "m", "dbar", "max_degree", "seed", "trial", "rho", "rho_over_ln_n"]


class UsageError(Exception):
    """Flag combination that parses but makes no sense; exits 2."""


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isnan(x):
            return ""
        return repr(round(x, 10))
    return str(x)


def _writer():
    return csv.writer(sys.stdout, lineterminator="\n")


def graph_from_spec(spec: str, seed: int) -> Graph:
    """Build a graph from ``pm:N``, ``path:N``, ``cycle:N``, ``star:N``, ``empty:N``, ``gnp:N:P`` or ``kab:A:B``."""
    kind, *args = spec.split(":")
    try:
        if kind in ("pm", "path", "cycle", "star", "empty") and len(args) == 1:
            n = int(args[0])
            if kind == "empty":
                if n < 0:
                    raise ValueError("n must be non-negative")
                return Graph.from_edges(n, [])
            return gen_structured("perfect_matching" if kind == "pm" else kind, n)
        if kind == "gnp" and len(args) == 2:
            return gen_gnp(int(args[0]), float(args[1]), derive_seed(seed, 0))
        if kind == "kab" and len(args) == 2:
            return gen_complete_bipartite(int(args[0]), int(args[1]))
    except ValueError as exc:
        raise UsageError(f"bad graph spec {spec!r}: {exc}") from None
    raise UsageError(f"bad graph spec {spec!r}")


def _load_graph(args) -> tuple[str, Graph]:
    if args.graph is not None:
        path = Path(args.graph)
        try:
            return path.name, load_edge_list(path.read_bytes())
        except OSError as exc:
            raise ValueError(f"cannot read {path}: {exc.strerror}") from None
    return args.gen, graph_from_spec(args.gen, args.seed)


def _describe(g: Graph) -> tuple[str, int]:
    if g.n == 0:
        return "0", 0
    st = stats(g)
    return _fmt(float(st.avg_degree)), st.max_degree


# -- commands ---------------------------------------------------------------------------


def cmd_estimate(args) -> int:
    if args.model == "matrix" and args.mode == "mult":
        raise UsageError("the adjacency-matrix model has no multiplicative estimator")
    name, g = _load_graph(args)
    consts = Constants(
        multiplicative=args.const_mult if args.const_mult is not None else Constants.multiplicative,
        additive=args.const_additive if args.const_additive is not None else Constants.additive,
    )
    build = {("list", "mult"): list_multiplicative_run, ("list", "additive"): list_additive_run,
             ("matrix", "additive"): matrix_additive_run}[(args.model, args.mode)]
    t0 = time.perf_counter()
    result = race_instances(lambda s: build(g, args.eps, s, engine=args.engine, constants=consts),
                            args.race, args.seed, quantum=args.quantum)
    elapsed = time.perf_counter() - t0
    est = result.estimate
    mu = nu = None
    if g.n <= AUTO_EXACT_MAX_N:
        mu, nu = exact_maximum_matching(g), exact_min_vertex_cover(g)
    dbar, max_deg = _describe(g)
    row = [name, g.n, g.m, dbar, max_deg, args.model, args.mode, _fmt(args.eps), args.seed, args.race,
           result.winner, est.samples, _fmt(est.matched_fraction), _fmt(est.mu_tilde), _fmt(est.nu_tilde),
           _fmt(est.raw_mu), _fmt(est.raw_nu), est.cost.degree_queries, est.cost.neighbor_queries,
           est.cost.pair_queries, est.cost.total, est.oracle_calls, est.max_path, _fmt(mu), _fmt(nu)]
    out = _writer()
    out.writerow(ESTIMATE_COLUMNS + (["elapsed"] if args.timing else []))
    out.writerow(row + ([_fmt(elapsed)] if args.timing else []))
    return EXIT_OK


def _query_graphs(args):
    if args.gen is not None:
        yield args.gen, graph_from_spec(args.gen, args.seed), args.seed
        return
    for i, dbar in enumerate(args.dbar):
        gseed = derive_seed(args.seed, i + 1)
        p = min(1.0, dbar / args.n) if args.n > 0 else 0.0
        yield f"gnp:{args.n}:{_fmt(p)}", gen_gnp(args.n, p, gseed), gseed


def cmd_bench_queries(args) -> int:
    from . import _kernel

    out = _writer()
    out.writerow(QUERY_TRIAL_COLUMNS if args.per_trial else QUERY_COLUMNS)
    for name, g, gseed in _query_graphs(args):
        dbar, max_deg = _describe(g)
        if g.n == 0 or args.trials == 0:
            rows = np.zeros((0, 9), dtype=np.int64)
        else:
            top = IntervalLadder(max_deg).top
            rows = _kernel.list_samples(g.csr(), np.arange(g.n), top, derive_seed(args.seed, 0), 0, args.trials)
        t = rows[:, 3].astype(float)
        queries = rows[:, 5] + rows[:, 6]
        if args.per_trial:
            for i, r in enumerate(rows):
                out.writerow([name, g.n, g.m, dbar, max_deg, gseed, i, r[0], r[1], r[3], r[4], queries[i]])
            continue
        davg = 2 * g.m / g.n if g.n else 0.0
        norm = davg * math.log(g.n) if g.n > 1 else 0.0
        mean_t = float(t.mean()) if len(t) else 0.0
        pct = (lambda q: float(np.percentile(t, q))) if len(t) else (lambda q: 0.0)
        out.writerow([name, g.n, g.m, dbar, max_deg, gseed, args.trials, _fmt(mean_t), _fmt(pct(50)),
                      _fmt(pct(90)), _fmt(pct(99)), _fmt(float(t.max()) if len(t) else 0.0),
                      _fmt(mean_t / norm) if norm else "",
                      _fmt(float(rows[:, 4].mean()) if len(t) else 0.0),
                      _fmt(float(queries.mean()) if len(t) else 0.0)])
    return EXIT_OK


def cmd_bench_rounds(args) -> int:
    out = _writer()
    out.writerow(ROUND_COLUMNS)
    if args.gen is not None:
        name, g, gseed = args.gen, graph_from_spec(args.gen, args.seed), args.seed
    else:
        gseed = derive_seed(args.seed, 1)
        p = min(1.0, args.dbar / args.n) if args.n > 0 else 0.0
        name, g = f"gnp:{args.n}:{_fmt(p)}", gen_gnp(args.n, p, gseed)
    dbar, max_deg = _describe(g)
    ln_n = math.log(g.n) if g.n > 1 else float("nan")
    for i in range(args.trials):
        rho = parallel_rounds(g, ExplicitRanks.draw(g, derive_seed(args.seed, 1000 + i))).rho
        out.writerow([name, g.n, g.m, dbar, max_deg, gseed, i, rho, _fmt(rho / ln_n)])
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import BudgetExceeded, run_suites

    names = ["oracle", "rounds", "vizing", "lazy"] if args.suite == "all" else [args.suite]

    def report(check):
        status = "pass" if check.passed else "FAIL"
        tail = f" ({check.detail})" if check.detail and not check.passed else ""
        print(f"{check.suite} {check.name} {status}{tail}", flush=True)

    try:
        checks = run_suites(names, args.budget, report)
    except BudgetExceeded as exc:
        print(f"budget of {args.budget}s exceeded after {len(exc.completed)} checks", file=sys.stderr)
        return EXIT_BUDGET
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_gen(args) -> int:
    sys.stdout.write(dump_edge_list(graph_from_spec(args.gen, args.seed)))
    return EXIT_OK


# -- parser -----------------------------------------------------------------------------


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sublinear-match", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="run one estimator (optionally a race of several instances)")
    src = est.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="edge-list file")
    src.add_argument("--gen", help="graph spec, e.g. pm:1000 or gnp:500:0.01")
    est.add_argument("--model", choices=["list", "matrix"], required=True)
    est.add_argument("--mode", choices=["mult", "additive"], required=True)
    est.add_argument("--eps", type=float, required=True)
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--race", type=int, default=1, help="number of racing instances (default 1)")
    est.add_argument("--quantum", type=int, default=1024, help="race budget step in queries")
    est.add_argument("--engine", choices=["kernel", "python"], default="kernel")
    est.add_argument("--const-mult", type=float, help="override the multiplicative sample constant")
    est.add_argument("--const-additive", type=float, help="override the additive sample constant")
    est.add_argument("--timing", action="store_true", help="append a wall-clock elapsed column")
    est.set_defaults(func=cmd_estimate)

    bq = sub.add_parser("bench-queries", help="oracle calls T per session on random vertices")
    bq.add_argument("--n", type=int, default=10_000)
    bq.add_argument("--dbar", type=_float_list, default=[2.0, 8.0, 32.0])
    bq.add_argument("--gen", help="benchmark this graph instead of G(n, dbar/n)")
    bq.add_argument("--trials", type=int, default=1000)
    bq.add_argument("--seed", type=int, default=0)
    bq.add_argument("--per-trial", action="store_true", help="one row per session instead of a summary")
    bq.set_defaults(func=cmd_bench_queries)

    br = sub.add_parser("bench-rounds", help="parallel round count rho over random permutations")
    br.add_argument("--n", type=int, default=1000)
    br.add_argument("--dbar", type=float, default=8.0)
    br.add_argument("--gen", help="use this graph instead of G(n, dbar/n)")
    br.add_argument("--trials", type=int, default=1000)
    br.add_argument("--seed", type=int, default=0)
    br.set_defaults(func=cmd_bench_rounds)

    ver = sub.add_parser("verify", help="exhaustive small-instance checks")
    ver.add_argument("--suite", choices=["oracle", "rounds", "vizing", "lazy", "all"], default="all")
    ver.add_argument("--budget", type=float, help="wall-clock budget in seconds")
    ver.set_defaults(func=cmd_verify)

    gen = sub.add_parser("gen", help="write a generated graph as an edge list")
    gen.add_argument("--gen", required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for flag in ("trials", "race", "quantum", "n"):
        if getattr(args, flag, 0) is not None and getattr(args, flag, 0) < 0:
            parser.error(f"--{flag} must be non-negative")
    if getattr(args, "race", 1) == 0:
        parser.error("--race must be at least 1")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sublinear-match: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, BudgetError, EdgeListError) as exc:
        print(f"sublinear-match: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
