"""Matching-size and vertex-cover-size estimators built on the local oracle.

All three estimators share one recipe: sample ``k`` vertices with
replacement, decide for each one (in a fresh oracle session over freshly
drawn lazy ranks) whether it is matched by randomized greedy matching, and
rescale the matched fraction ``f``.

Sample ``i`` of a run with seed ``s`` uses the stream
``SplitMix64(derive_seed(s, i))``: first to pick its vertex, then to drive the
lazy ranks. Samples are therefore independent of evaluation order, which is
what lets the compiled kernel evaluate them in bulk, lets threads split them,
and lets ``race_instances`` read ahead without changing any result.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Literal

import numpy as np

from .graph import AccessCounter, Graph, ListAccess, degree_query
from .hview import HView
from .oracle import OracleSession
from .ranks import IntervalLadder, LazyRanks
from .rng import MASK64, SplitMix64, derive_seed, mix64

__all__ = [
    "Constants",
    "Estimate",
    "EstimatorRun",
    "RaceResult",
    "estimate_list_additive",
    "estimate_list_multiplicative",
    "estimate_matrix_additive",
    "instance_seed",
    "list_additive_run",
    "list_multiplicative_run",
    "matrix_additive_run",
    "race_instances",
]

Engine = Literal["kernel", "python"]

# columns of a per-sample row
_VERTEX, _HIT, _PARTNER, _T, _PATH, _DEG, _NBR, _MAXQ, _PAIR = range(9)
_CHUNK = 4096


@dataclass(frozen=True)
class Constants:
    """Leading constants of the sample-size formulas (defaults are the published ones)."""

    multiplicative: float = 128 * 24
    additive: float = 16 * 24


@dataclass(frozen=True)
class Estimate:
    mu_tilde: float
    nu_tilde: float
    samples: int
    matched_fraction: float
    cost: AccessCounter
    n: int
    raw_mu: float
    raw_nu: float
    oracle_calls: int = 0
    max_path: int = 0
    elapsed: float = field(default=0.0, compare=False)


def _threads() -> int:
    cap = os.environ.get("SUBLINEAR_MATCH_THREADS")
    workers = os.cpu_count() or 1
    if cap:
        try:
            workers = min(workers, max(1, int(cap)))
        except ValueError:
            raise ValueError(f"SUBLINEAR_MATCH_THREADS must be an integer, got {cap!r}") from None
    return workers


def _check_eps(eps: float) -> None:
    if not (isinstance(eps, (int, float)) and 0 < eps <= 1):
        raise ValueError(f"eps must lie in (0, 1], got {eps!r}")


class _Sampler:
    """Per-sample rows for one (model, graph, seed); rows depend only on the sample index."""

    def __init__(self, seed: int, engine: Engine):
        if engine not in ("kernel", "python"):
            raise ValueError(f"unknown engine {engine!r}")
        self.seed = seed & MASK64
        self.engine = engine

    def rows(self, start: int, count: int) -> np.ndarray:
        if count <= 0:
            return np.zeros((0, 9), dtype=np.int64)
        if self.engine == "python":
            return np.array([self._python_row(start + i) for i in range(count)], dtype=np.int64)
        workers = _threads()
        if workers == 1 or count < 2 * _CHUNK:
            return self._kernel_rows(start, count)
        spans = [(s, min(_CHUNK, start + count - s)) for s in range(start, start + count, _CHUNK)]
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda sp: self._kernel_rows(*sp), spans))
        return np.concatenate(parts)


class _ListSampler(_Sampler):
    def __init__(self, g: Graph, pool: np.ndarray, degree_bound: int, seed: int, engine: Engine):
        super().__init__(seed, engine)
        self.graph = g
        self.pool = np.asarray(pool, dtype=np.int64)
        self.degree_bound = degree_bound
        self.top = IntervalLadder(degree_bound).top
        self._csr = g.csr() if engine == "kernel" else None

    def _kernel_rows(self, start: int, count: int) -> np.ndarray:
        from . import _kernel

        rows = _kernel.list_samples(self._csr, self.pool, self.top, self.seed, start, count)
        return np.hstack([rows, np.zeros((count, 1), dtype=np.int64)])

    def _python_row(self, index: int) -> tuple[int, ...]:
        rng = SplitMix64(derive_seed(self.seed, index))
        v = int(self.pool[rng.bounded(len(self.pool))])
        counter = AccessCounter()
        ranks = LazyRanks(ListAccess(self.graph, counter), rng, self.degree_bound)
        session = OracleSession(ranks, counter=counter)
        hit = session.vertex_oracle(v)
        return (v, int(hit), session.partner if hit else -1, session.t_count, session.max_path,
                counter.degree_queries, counter.neighbor_queries,
                max(session.q_count.values(), default=0), 0)


class _MatrixSampler(_Sampler):
    def __init__(self, g: Graph, eps: float, seed: int, engine: Engine):
        super().__init__(seed, engine)
        self.graph = g
        self.eps = eps
        self.h = HView(g, eps)
        self._adj = g.dense_adjacency() if engine == "kernel" else None

    def _kernel_rows(self, start: int, count: int) -> np.ndarray:
        from . import _kernel

        return _kernel.matrix_samples(self._adj, self.h.s, self.seed, start, count)

    def _python_row(self, index: int) -> tuple[int, ...]:
        rng = SplitMix64(derive_seed(self.seed, index))
        v = rng.bounded(self.graph.n)
        counter = AccessCounter()
        h = HView(self.graph, self.eps, counter)
        ranks = LazyRanks(h, rng, degree_bound=h.max_degree)
        session = OracleSession(ranks, n_vertices=h.n, counter=counter)
        hit = session.vertex_oracle(v)
        partner = session.partner if hit else -1
        return (v, int(hit and partner < self.graph.n), partner, session.t_count, session.max_path,
                counter.degree_queries, counter.neighbor_queries,
                max(session.q_count.values(), default=0), counter.pair_queries)


class EstimatorRun:
    """One estimator instance that can be advanced under a query budget.

    ``advance(budget)`` consumes samples until the instance has spent at
    least ``budget`` queries in total or has finished; ``run()`` finishes it.
    Rows are computed ahead in chunks, but the budget is charged per sample,
    so the interleaving granularity is a single oracle session.
    """

    def __init__(self, *, n: int, n_eff: int, k: int, sampler: _Sampler | None,
                 finish: Callable[[float, int], tuple[float, float]],
                 preprocessing: AccessCounter | None = None):
        self.n = n
        self.n_eff = n_eff
        self.k = k
        self.sampler = sampler
        self._finish = finish
        self.cost = preprocessing.snapshot() if preprocessing is not None else AccessCounter()
        self.hits = 0
        self.done_samples = 0
        self.oracle_calls = 0
        self.max_path = 0
        self.elapsed = 0.0
        self._buf = np.zeros((0, 9), dtype=np.int64)
        self._buf_start = 0

    @property
    def finished(self) -> bool:
        return self.done_samples >= self.k

    def advance(self, budget: float) -> bool:
        t0 = time.perf_counter()
        while not self.finished and self.cost.total < budget:
            if self.done_samples - self._buf_start >= len(self._buf):
                self._buf_start = self.done_samples
                self._buf = self.sampler.rows(self.done_samples, min(_CHUNK, self.k - self.done_samples))
            lo = self.done_samples - self._buf_start
            take = len(self._buf) - lo
            if not math.isinf(budget):
                # same cut as charging one row at a time: stop at the first row that reaches the budget
                spent = np.cumsum(self._buf[lo:, _DEG] + self._buf[lo:, _NBR] + self._buf[lo:, _PAIR])
                take = min(take, int(np.searchsorted(spent, budget - self.cost.total, side="left")) + 1)
            rows = self._buf[lo:lo + take]
            self.hits += int(rows[:, _HIT].sum())
            self.oracle_calls += int(rows[:, _T].sum())
            self.max_path = max(self.max_path, int(rows[:, _PATH].max()))
            self.cost.degree_queries += int(rows[:, _DEG].sum())
            self.cost.neighbor_queries += int(rows[:, _NBR].sum())
            self.cost.pair_queries += int(rows[:, _PAIR].sum())
            self.done_samples += take
        self.elapsed += time.perf_counter() - t0
        return self.finished

    def run(self) -> Estimate:
        self.advance(math.inf)
        return self.result()

    def result(self) -> Estimate:
        if not self.finished:
            raise RuntimeError("estimator instance has not finished")
        f = self.hits / self.k if self.k else 0.0
        raw_mu, raw_nu = self._finish(f, self.n_eff)
        mu = min(max(raw_mu, 0.0), self.n / 2)
        nu = min(max(raw_nu, 0.0), float(self.n))
        return Estimate(mu, nu, self.k, f, self.cost.snapshot(), self.n, raw_mu, raw_nu,
                        self.oracle_calls, self.max_path, self.elapsed)


def _sample_count(numerator: float, eps: float) -> int:
    return max(1, math.ceil(numerator / (eps * eps)))


def list_multiplicative_run(g: Graph, eps: float, seed: int, *, engine: Engine = "kernel",
                            constants: Constants = Constants()) -> EstimatorRun:
    """Multiplicative (2(1+eps))-style estimator for the adjacency-list model.

    Preprocessing queries every degree (charged to the run's cost), drops
    singletons, and works on the remaining ``n'`` vertices with their exact
    average and maximum degree.
    """
    _check_eps(eps)
    pre = AccessCounter()
    degrees = [degree_query(g, v, pre) for v in range(g.n)]
    pool = np.array([v for v, d in enumerate(degrees) if d > 0], dtype=np.int64)
    n_eff = len(pool)
    half = 1 - eps / 2
    grow = 1 + eps / 2

    def finish(f: float, n_: int) -> tuple[float, float]:
        return half * f * n_ / 2, grow * f * n_

    if n_eff == 0:
        return EstimatorRun(n=g.n, n_eff=0, k=0, sampler=None, finish=finish, preprocessing=pre)
    max_deg = max(degrees)
    avg_deg = Fraction(sum(degrees), n_eff)
    k = _sample_count(constants.multiplicative * max_deg * math.log(n_eff) / float(avg_deg), eps)
    sampler = _ListSampler(g, pool, max_deg, seed, engine)
    return EstimatorRun(n=g.n, n_eff=n_eff, k=k, sampler=sampler, finish=finish, preprocessing=pre)


def list_additive_run(g: Graph, eps: float, seed: int, *, engine: Engine = "kernel",
                      constants: Constants = Constants()) -> EstimatorRun:
    """Additive estimator for the adjacency-list model; no preprocessing pass."""
    _check_eps(eps)

    def finish(f: float, n_: int) -> tuple[float, float]:
        return f * n_ / 2 - eps * n_ / 2, f * n_ + eps * n_ / 4

    if g.n == 0:
        return EstimatorRun(n=0, n_eff=0, k=0, sampler=None, finish=finish)
    k = _sample_count(constants.additive * math.log(g.n), eps)
    # n - 1 bounds every degree without looking at the graph
    sampler = _ListSampler(g, np.arange(g.n), max(g.n - 1, 0), seed, engine)
    return EstimatorRun(n=g.n, n_eff=g.n, k=k, sampler=sampler, finish=finish)


def matrix_additive_run(g: Graph, eps: float, seed: int, *, engine: Engine = "kernel",
                        constants: Constants = Constants()) -> EstimatorRun:
    """Additive estimator for the adjacency-matrix model, via the virtual graph H."""
    _check_eps(eps)

    def finish(f: float, n_: int) -> tuple[float, float]:
        return f * n_ / 2 - eps * n_ / 2, f * n_ + eps * n_ / 2

    sampler = _MatrixSampler(g, eps, seed, engine)  # validates eps >= 1/n
    k = _sample_count(constants.additive * math.log(g.n), eps)
    return EstimatorRun(n=g.n, n_eff=g.n, k=k, sampler=sampler, finish=finish)


def estimate_list_multiplicative(g: Graph, eps: float, seed: int, **kw) -> Estimate:
    return list_multiplicative_run(g, eps, seed, **kw).run()


def estimate_list_additive(g: Graph, eps: float, seed: int, **kw) -> Estimate:
    return list_additive_run(g, eps, seed, **kw).run()


def estimate_matrix_additive(g: Graph, eps: float, seed: int, **kw) -> Estimate:
    return matrix_additive_run(g, eps, seed, **kw).run()


# -- racing ------------------------------------------------------------------------------


def instance_seed(master: int, i: int) -> int:
    """Seed of race instance ``i``; instance 0 reuses ``master`` so a one-instance race is a plain run."""
    if i == 0:
        return master & MASK64
    return derive_seed(mix64(master & MASK64), i)


@dataclass(frozen=True)
class RaceResult:
    estimate: Estimate
    winner: int
    rounds: int
    instance_costs: tuple[int, ...]

    @property
    def total_cost(self) -> int:
        return sum(self.instance_costs)


def race_instances(factory: Callable[[int], EstimatorRun], count: int, seed: int,
                   quantum: int = 1024) -> RaceResult:
    """Run ``count`` independent instances round-robin and keep the first to finish.

    Round ``r`` lets every instance, in index order, spend queries up to
    ``r * quantum``. The first instance to finish wins; ties within a round go
    to the lowest index. ``factory(seed_i)`` builds instance ``i``.
    """
    if count < 1:
        raise ValueError("race needs at least one instance")
    if quantum < 1:
        raise ValueError("quantum must be positive")
    runs = [factory(instance_seed(seed, i)) for i in range(count)]
    rnd = 0
    while True:
        rnd += 1
        for i, run in enumerate(runs):
            if run.advance(rnd * quantum):
                costs = tuple(r.cost.total for r in runs)
                return RaceResult(run.result(), i, rnd, costs)
