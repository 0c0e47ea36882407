"""Acceptance suite: the twelve headline criteria at their stated tolerances.

Each ``criterion_*`` function returns ``(passed, detail)``. Under pytest every
criterion is one test and a summary line per criterion is printed at the end
of the session (see ``conftest.py``); run this file directly to get the same
lines without pytest.
"""

from __future__ import annotations

import contextlib
import csv
import io
import itertools
import math
import sys
import time

import numpy as np
import pytest

from sublinear_match import _kernel
from sublinear_match.cli import main as cli_main
from sublinear_match.corpus import connected_graphs, estimator_fixtures, full_corpus
from sublinear_match.estimators import (estimate_list_additive, estimate_list_multiplicative,
                                        estimate_matrix_additive)
from sublinear_match.graph import AccessCounter, Graph, gen_gnp, gen_structured
from sublinear_match.hview import HView
from sublinear_match.oracle import OracleSession
from sublinear_match.ranks import ExplicitRanks, IntervalLadder
from sublinear_match.reference import (exact_maximum_matching, exact_min_vertex_cover,
                                       gmm_size_distribution, greedy_matching, parallel_rounds)
from sublinear_match.rng import derive_seed
from sublinear_match.verify import oracle_suite, rounds_suite, vizing_suite

RESULTS: dict[int, tuple[str, bool, str]] = {}
TRIALS = 50
NEEDED = 49


def _failures(checks) -> tuple[int, int, list[str]]:
    checks = list(checks)
    bad = [f"{c.name}: {c.detail}" for c in checks if not c.passed]
    return len(checks), len(bad), bad


# 1 -------------------------------------------------------------------------------------

def criterion_1():
    total, bad, names = _failures(oracle_suite(max_edges=5, fixtures_up_to=7))
    return bad == 0, f"{total - bad}/{total} graphs agree on every permutation and vertex" + (
        f"; failing: {names[:5]}" if bad else "")


# 2 -------------------------------------------------------------------------------------

def criterion_2():
    worst = 0.0  # max over sessions of Q / (2n - 1)
    sessions = 0
    for _, g in connected_graphs(5):
        for order in itertools.permutations(range(g.m)):
            ranks = ExplicitRanks.from_order(g, order)
            for v in range(g.n):
                s = OracleSession(ranks)
                s.vertex_oracle(v)
                worst = max(worst, max(s.q_count.values(), default=0) / (2 * g.n - 1))
                sessions += 1
    for i, (_, g) in enumerate(estimator_fixtures()):
        if g.m == 0:
            continue
        top = IntervalLadder(max(g.degree(v) for v in range(g.n))).top
        rows = _kernel.list_samples(g.csr(), np.arange(g.n), top, derive_seed(2, i), 0, 5000)
        worst = max(worst, rows[:, 7].max() / (2 * g.n - 1))
        sessions += len(rows)
        if g.n <= 12:
            h = HView(g, 0.5)
            rows = _kernel.matrix_samples(g.dense_adjacency(), h.s, derive_seed(3, i), 0, 500)
            worst = max(worst, rows[:, 7].max() / (2 * h.n - 1))
            sessions += len(rows)
    return worst <= 1.0, f"{sessions} sessions, max Q/(2n-1) = {worst:.4f}"


# 3 -------------------------------------------------------------------------------------

def criterion_3():
    total, bad, names = _failures(rounds_suite(max_edges=0, random_instances=100, seed=3))
    return bad == 0, f"{total - bad}/{total} random instances with max_path <= 2*rho+1 in every session" + (
        f"; failing: {names[:5]}" if bad else "")


# 4 -------------------------------------------------------------------------------------

def _cli_rows(argv: list[str]) -> list[dict[str, str]]:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli_main(argv)
    assert code == 0, f"CLI exited {code}"
    return list(csv.DictReader(io.StringIO(buf.getvalue())))


def criterion_4():
    rows = _cli_rows(["bench-queries", "--n", "10000", "--dbar", "2,8,32", "--trials", "1000", "--seed", "4"])
    ratios = [float(r["ratio"]) for r in rows]
    spread = max(ratios) / min(ratios)
    ok = all(r <= 10 for r in ratios) and spread <= 4
    return ok, "mean T/(dbar ln n) = " + ", ".join(f"{r:.4f}" for r in ratios) + f"; spread {spread:.3f}"


# 5 -------------------------------------------------------------------------------------

def criterion_5():
    bad = 0
    checked = 0
    for _, g in connected_graphs(6):
        for order in itertools.permutations(range(g.m)):
            ranks = ExplicitRanks.from_order(g, order)
            bad += greedy_matching(g, ranks).edges != parallel_rounds(g, ranks).matching.edges
            checked += 1
    for i in range(100):
        n = 20 + (53 * i) % 481
        g = gen_gnp(n, min(1.0, (2, 8, 32)[i % 3] / (n - 1)), derive_seed(5, i))
        ranks = ExplicitRanks.draw(g, derive_seed(50, i))
        bad += greedy_matching(g, ranks).edges != parallel_rounds(g, ranks).matching.edges
        checked += 1
    return bad == 0, f"{checked - bad}/{checked} (graph, permutation) pairs give identical edge sets"


# 6-8 -----------------------------------------------------------------------------------

_EXACT: dict[str, tuple[int, int]] = {}


def _exact(name: str, g: Graph) -> tuple[int, int]:
    if name not in _EXACT:
        _EXACT[name] = exact_maximum_matching(g), exact_min_vertex_cover(g)
    return _EXACT[name]


def _sandwich(estimate, bounds, base_seed: int) -> tuple[bool, str]:
    tol = 1e-9
    worst = []
    ok = True
    for gi, (name, g) in enumerate(estimator_fixtures()):
        mu, nu = _exact(name, g)
        lo_mu, hi_mu, lo_nu, hi_nu = bounds(mu, nu, g.n)
        good = 0
        for t in range(TRIALS):
            est = estimate(g, derive_seed(base_seed, 1000 * gi + t))
            good += (lo_mu - tol <= est.mu_tilde <= hi_mu + tol) and (lo_nu - tol <= est.nu_tilde <= hi_nu + tol)
        worst.append((good, name))
        ok &= good >= NEEDED
    low = min(worst)
    return ok, f"every graph >= {NEEDED}/{TRIALS}; weakest {low[1]} at {low[0]}/{TRIALS}" if ok else \
        "below threshold: " + ", ".join(f"{n} {k}/{TRIALS}" for k, n in worst if k < NEEDED)


def criterion_6():
    eps = 0.2
    return _sandwich(lambda g, s: estimate_list_additive(g, eps, s),
                     lambda mu, nu, n: (mu / 2 - eps * n, mu, nu, 2 * nu + eps * n), 6)


def criterion_7():
    eps = 0.5
    return _sandwich(lambda g, s: estimate_list_multiplicative(g, eps, s),
                     lambda mu, nu, n: ((1 - eps) * mu / 2, mu, nu, (1 + eps) * 2 * nu), 7)


def criterion_8():
    eps = 0.25
    ok, detail = _sandwich(lambda g, s: estimate_matrix_additive(g, eps, s),
                           lambda mu, nu, n: (mu / 2 - eps * n, mu, nu, 2 * nu + eps * n), 8)
    n = 500
    g = gen_gnp(n, 4 / n, derive_seed(8, 0))
    est = estimate_matrix_additive(g, eps, derive_seed(8, 1))
    bound = 20 * (n / eps**3) * math.log2(n) ** 2
    cost_ok = est.cost.pair_queries <= bound
    return ok and cost_ok, (f"{detail}; G(500, 4/500): {est.cost.pair_queries} pair queries vs "
                            f"20(n/eps^3)log2^2 n = {bound:.0f} (with ln^2 n: {bound / math.log2(math.e) ** 2:.0f})")


# 9 -------------------------------------------------------------------------------------

def _materialized_h(g: Graph, s: int) -> list[list[int]]:
    """Adjacency lists of H built directly from the construction, in position order."""
    n = g.n
    adj = [[] for _ in range(2 * n + n * s)]
    for v in range(n):
        for j in range(n):
            if g.has_edge(v, j):
                adj[v].append(j)
                adj[n + v].append(n + j)
            else:
                adj[v].append(n + j)
                adj[n + v].append(j)
        for t in range(s):
            u = 2 * n + v * s + t
            adj[n + v].append(u)
            adj[u].append(n + v)
    return adj


def _h_graphs():
    yield "empty1", Graph.from_edges(1, [])
    yield "empty4", Graph.from_edges(4, [])
    for name, g in connected_graphs(5):
        if g.n <= 8:
            yield name, g
    yield "path8", gen_structured("path", 8)
    yield "gnp8", gen_gnp(8, 0.5, 9)


def criterion_9():
    graphs = 0
    bad = []
    for name, g in _h_graphs():
        for eps in (0.5, 1.0):
            if eps * g.n < 1:
                continue
            counter = AccessCounter()
            h = HView(g, eps, counter)
            ref = _materialized_h(g, h.s)
            ids: dict[tuple[int, int], int] = {}
            for x in range(h.n):
                if h.degree(x) != len(ref[x]):
                    bad.append(f"{name} eps={eps} degree of {x}")
                for i, y_ref in enumerate(ref[x], start=1):
                    before = counter.pair_queries
                    y, e = h.neighbor(x, i)
                    if counter.pair_queries - before > 1 or y != y_ref:
                        bad.append(f"{name} eps={eps} position {x}:{i}")
                    if ids.setdefault((min(x, y), max(x, y)), e) != e:
                        bad.append(f"{name} eps={eps} edge id of {x}-{y}")
            graphs += 1
    return not bad, f"{graphs} (graph, eps) views match the materialized H" + (f"; {bad[:5]}" if bad else "")


# 10 ------------------------------------------------------------------------------------

def criterion_10():
    n, p, draws = 10**6, 0.3, 10**5
    x = _kernel.binomial_draws(n, p, derive_seed(10, 0), draws).astype(np.float64)
    var = n * p * (1 - p)
    mean_z = abs(x.mean() - n * p) / math.sqrt(var / draws)
    var_rel = abs(x.var(ddof=1) / var - 1)
    ok_a = mean_z <= 3 and var_rel <= 0.05
    worst_tv, worst_name = 0.0, ""
    for gi, (name, g) in enumerate(connected_graphs(5)):
        exact = gmm_size_distribution(g)
        top = IntervalLadder(max(g.degree(v) for v in range(g.n))).top
        sizes = _kernel.gmm_sizes(g.csr(), top, derive_seed(11, gi), 10**5)
        emp = np.bincount(sizes, minlength=g.n // 2 + 1) / len(sizes)
        tv = 0.5 * sum(abs(emp[k] - float(exact.get(k, 0))) for k in range(len(emp)))
        if tv > worst_tv:
            worst_tv, worst_name = tv, name
    ok_b = worst_tv < 0.02
    return ok_a and ok_b, (f"(a) mean z = {mean_z:.3f}, variance off by {100 * var_rel:.3f}%; "
                           f"(b) max TV = {worst_tv:.4f} ({worst_name})")


# 11 ------------------------------------------------------------------------------------

def criterion_11():
    total, bad, names = _failures(vizing_suite())
    return bad == 0, f"{total - bad}/{total} corpus graphs satisfy mu >= n dbar/(4 Delta)" + (
        f"; failing: {names[:5]}" if bad else "")


# 12 ------------------------------------------------------------------------------------

def criterion_12():
    n = 1000
    g = gen_gnp(n, 8 / n, derive_seed(12, 0))
    rhos = np.array([parallel_rounds(g, ExplicitRanks.draw(g, derive_seed(12, 1 + t))).rho for t in range(1000)])
    p99 = float(np.percentile(rhos, 99))
    limit = 6 * math.log(n)
    return p99 <= limit, f"p99 rho = {p99:.1f} (max {rhos.max()}) vs 6 ln n = {limit:.2f}"


CRITERIA = [
    (1, "oracle agrees with global greedy", criterion_1),
    (2, "per-edge invocations within 2n-1", criterion_2),
    (3, "query path vs round count", criterion_3),
    (4, "average query complexity", criterion_4),
    (5, "sequential equals parallel greedy", criterion_5),
    (6, "additive list estimator bounds", criterion_6),
    (7, "multiplicative list estimator bounds", criterion_7),
    (8, "matrix estimator bounds and cost", criterion_8),
    (9, "H view conformance", criterion_9),
    (10, "lazy rank machinery", criterion_10),
    (11, "Vizing floor", criterion_11),
    (12, "round complexity concentration", criterion_12),
]


def _line(num: int) -> str:
    title, passed, detail = RESULTS[num]
    return f"criterion {num:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}"


@pytest.mark.slow
@pytest.mark.parametrize("num,title,check", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(num, title, check):
    t0 = time.perf_counter()
    passed, detail = check()
    RESULTS[num] = (title, passed, f"{detail} [{time.perf_counter() - t0:.1f}s]")
    assert passed, _line(num)


if __name__ == "__main__":
    failed = 0
    for num, title, check in CRITERIA:
        t0 = time.perf_counter()
        passed, detail = check()
        RESULTS[num] = (title, passed, f"{detail} [{time.perf_counter() - t0:.1f}s]")
        failed += not passed
        print(_line(num), flush=True)
    sys.exit(1 if failed else 0)
