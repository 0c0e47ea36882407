"""Exhaustive small-instance checks of the oracle against the global references.

Each suite yields ``Check`` records; ``run_suites`` enforces an optional
wall-clock budget and raises ``BudgetExceeded`` carrying the checks that did
complete.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Callable, Iterator

from .corpus import connected_graphs, full_corpus, path_cycle_star_fixtures
from .graph import Graph, gen_gnp, stats
from .oracle import OracleSession
from .ranks import ExplicitRanks, new_lazy
from .reference import exact_maximum_matching, greedy_matching, parallel_rounds, vizing_floor

__all__ = ["SUITES", "BudgetExceeded", "Check", "run_suites"]


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""


class BudgetExceeded(RuntimeError):
    def __init__(self, completed: list[Check]):
        super().__init__(f"time budget exceeded after {len(completed)} checks")
        self.completed = completed


def _orders(g: Graph) -> Iterator[tuple[int, ...]]:
    return itertools.permutations(range(g.m))


def oracle_suite(max_edges: int = 5, fixtures_up_to: int = 0) -> Iterator[Check]:
    """Vertex oracle vs. global greedy membership, every permutation, every vertex."""
    graphs = connected_graphs(max_edges) + (path_cycle_star_fixtures(fixtures_up_to) if fixtures_up_to else ())
    for name, g in graphs:
        bad = 0
        for order in _orders(g):
            ranks = ExplicitRanks.from_order(g, order)
            truth = greedy_matching(g, ranks).matched
            for v in range(g.n):
                if OracleSession(ranks).vertex_oracle(v) != truth[v]:
                    bad += 1
        yield Check("oracle", name, bad == 0, f"{bad} mismatches" if bad else "")


def rounds_suite(max_edges: int = 5, random_instances: int = 0, seed: int = 0) -> Iterator[Check]:
    """max_path <= 2*rho + 1 and sequential == parallel matching.

    Exhaustive over the corpus (skipped when ``max_edges`` is 0), then
    ``random_instances`` G(n, p) draws with n <= 200 and average degree 2 or 8.
    """
    for name, g in connected_graphs(max_edges) if max_edges else ():
        bad = [0, 0]
        for order in _orders(g):
            ranks = ExplicitRanks.from_order(g, order)
            bad[0] += _path_violations(g, ranks)
            bad[1] += greedy_matching(g, ranks).edges != parallel_rounds(g, ranks).matching.edges
        yield Check("rounds", name, bad == [0, 0], _detail(bad))
    for i in range(random_instances):
        n = 50 + (37 * i) % 151
        dbar = (2, 8)[i % 2]
        g = gen_gnp(n, min(1.0, dbar / (n - 1)), seed + i)
        ranks = ExplicitRanks.draw(g, seed + 10_000 + i)
        bad = [_path_violations(g, ranks), int(greedy_matching(g, ranks).edges
                                              != parallel_rounds(g, ranks).matching.edges)]
        yield Check("rounds", f"gnp{i}_n{n}_d{dbar}", bad == [0, 0], _detail(bad))


def _path_violations(g: Graph, ranks) -> int:
    rho = parallel_rounds(g, ranks).rho
    bad = 0
    for v in range(g.n):
        session = OracleSession(ranks)
        session.vertex_oracle(v)
        bad += session.max_path > 2 * rho + 1
    return bad


def _detail(bad: list[int]) -> str:
    return "" if bad == [0, 0] else f"{bad[0]} path violations, {bad[1]} matching mismatches"


def vizing_suite() -> Iterator[Check]:
    for name, g in full_corpus():
        mu = exact_maximum_matching(g)
        floor = vizing_floor(stats(g), g.n)
        yield Check("vizing", name, mu >= floor, f"mu={mu} floor={floor}")


def lazy_suite(seeds: int = 20) -> Iterator[Check]:
    """Lazy answers vs. an explicit replay of the ranks the lazy source revealed."""
    for name, g in connected_graphs(5) + path_cycle_star_fixtures(7):
        bad = 0
        for s in range(seeds):
            lazy = new_lazy(g, s)
            answers = [OracleSession(lazy).vertex_oracle(v) for v in range(g.n)]
            for v in range(g.n):
                d = lazy.degree(v)
                if d:
                    lazy.lowest(v, d)  # reveal every remaining rank at v
            revealed = lazy.revealed()
            replay = ExplicitRanks(g, [revealed[e] for e in range(g.m)])
            truth = greedy_matching(g, replay).matched
            bad += sum(answers[v] != truth[v] or OracleSession(replay).vertex_oracle(v) != truth[v]
                       for v in range(g.n))
        yield Check("lazy", name, bad == 0, f"{bad} mismatches" if bad else "")


SUITES: dict[str, Callable[[], Iterator[Check]]] = {
    "oracle": oracle_suite,
    "rounds": rounds_suite,
    "vizing": vizing_suite,
    "lazy": lazy_suite,
}


def run_suites(names: list[str], budget: float | None = None,
               report: Callable[[Check], None] | None = None) -> list[Check]:
    deadline = None if budget is None else time.monotonic() + budget
    done: list[Check] = []
    for name in names:
        for check in SUITES[name]():
            done.append(check)
            if report is not None:
                report(check)
            if deadline is not None and time.monotonic() > deadline:
                raise BudgetExceeded(done)
    return done
