"""Edge-rank sources: explicit (all ranks drawn up front) and lazy.

A rank is a 64-bit integer read as the real ``r / 2**64`` in [0, 1). Ties are
broken by edge id, so every comparison in the package goes through the key
``(r, edge id)`` and every run induces a genuine permutation of the edges.

The lazy source reveals ranks interval by interval. The unit interval is cut
into ``I_0 = [0, 1/D)`` and ``I_i = [2**(i-1)/D, 2**i/D)`` for
``i = 1..log2 D``, where ``D`` is a power of two bounding the maximum degree.
Each vertex knows all of its edges whose rank lies below its frontier, and
pushing the frontier up by one interval costs roughly the number of edges
that land in the interval just opened.
"""

from __future__ import annotations

import bisect
import math
from fractions import Fraction
from typing import NamedTuple, Protocol

from .graph import AccessCounter, Graph, ListAccess
from .rng import SplitMix64

__all__ = [
    "ContractViolation",
    "ExplicitRanks",
    "IntervalLadder",
    "LazyRanks",
    "RankValue",
    "binomial_sample",
    "new_explicit",
    "new_lazy",
    "sample_indices",
]

# pmf terms this far (in nats) below the mode are treated as zero mass
_LOG_TAIL_CUTOFF = 60.0


class ContractViolation(RuntimeError):
    """A rank source was asked for something its contract forbids."""


class RankValue(NamedTuple):
    r: int
    edge: int

    @property
    def real(self) -> float:
        return self.r / 2.0**64


class ListModel(Protocol):
    n: int

    def degree(self, v: int) -> int: ...

    def neighbor(self, v: int, i: int) -> tuple[int, int]: ...

    def endpoints(self, e: int) -> tuple[int, int]: ...


class IntervalLadder:
    """The dyadic partition of [0, 1) used for lazy exposure.

    Boundaries are kept as integers in units of ``2**-64`` so that rank draws
    and interval membership are exact.
    """

    def __init__(self, degree_bound: int):
        self.top = 1 << max(int(degree_bound) - 1, 0).bit_length()
        self.levels = self.top.bit_length() - 1  # index of the last interval
        self.starts = [self.start(k) for k in range(self.levels + 2)]

    def start(self, k: int) -> int:
        if k == 0:
            return 0
        if k > self.levels:
            return 1 << 64
        return 1 << (64 + k - 1 - self.levels)

    def width_bits(self, k: int) -> int:
        return 64 - self.levels + max(k - 1, 0)

    def bounds(self, k: int) -> tuple[Fraction, Fraction]:
        return Fraction(self.starts[k], 1 << 64), Fraction(self.starts[k + 1], 1 << 64)

    def prob(self, k: int) -> float:
        """Probability that a rank lies in I_k given that it is at least s_k."""
        if k == 0:
            return 1.0 / float(self.top)
        half = 1 << (k - 1)
        return float(half) / float(self.top - half)

    def draw(self, k: int, rng: SplitMix64) -> int:
        return self.starts[k] + (rng.next_u64() >> (64 - self.width_bits(k)))

    def index_of(self, r: int) -> int:
        return bisect.bisect_right(self.starts, r) - 1


def binomial_sample(n: int, p: float, rng: SplitMix64) -> int:
    """Exact Binomial(n, p) draw by inverse transform started at the mode.

    One uniform is consumed per attempt; pmf terms are walked outward from the
    mode, alternating below and above, using the log-space ratio
    ``pmf(k+1)/pmf(k) = (n-k)/(k+1) * p/(1-p)``. If rounding leaves the
    uniform unassigned the attempt is redrawn. Expected work is
    O(sqrt(n p (1-p)) + 1).
    """
    if n < 0 or not 0.0 <= p <= 1.0:
        raise ValueError("need n >= 0 and 0 <= p <= 1")
    if n == 0 or p == 0.0:
        return 0
    if p == 1.0:
        return n
    if p > 0.5:
        return n - binomial_sample(n, 1.0 - p, rng)
    log_p = math.log(p)
    log_q = math.log(1.0 - p)
    log_ratio = log_p - log_q
    mode = int((n + 1) * p)
    if mode > n:
        mode = n
    log_mode = (math.lgamma(n + 1.0) - math.lgamma(mode + 1.0) - math.lgamma(n - mode + 1.0)
                + mode * log_p + (n - mode) * log_q)
    floor = log_mode - _LOG_TAIL_CUTOFF
    while True:
        u = rng.random() - math.exp(log_mode)
        if u < 0.0:
            return mode
        lo, lo_lp = mode, log_mode
        hi, hi_lp = mode, log_mode
        while (lo > 0 and lo_lp > floor) or (hi < n and hi_lp > floor):
            if lo > 0 and lo_lp > floor:
                lo_lp += math.log(lo) - math.log(n - lo + 1) - log_ratio
                lo -= 1
                u -= math.exp(lo_lp)
                if u < 0.0:
                    return lo
            if hi < n and hi_lp > floor:
                hi_lp += math.log(n - hi) - math.log(hi + 1) + log_ratio
                hi += 1
                u -= math.exp(hi_lp)
                if u < 0.0:
                    return hi


def sample_indices(d: int, size: int, rng: SplitMix64) -> list[int]:
    """``size`` distinct uniform indices from 1..d (partial Fisher-Yates over a sparse map)."""
    swaps: dict[int, int] = {}
    out = []
    for j in range(size):
        r = j + rng.bounded(d - j)
        out.append(swaps.get(r, r) + 1)
        swaps[r] = swaps.get(j, j)
    return out


class ExplicitRanks:
    """Every edge rank drawn up front; ``lowest`` reads a pre-sorted adjacency list.

    Explicit sources see the whole graph and charge no queries.
    """

    def __init__(self, g: Graph, values: list[int]):
        if len(values) != g.m:
            raise ValueError("need exactly one rank per edge")
        self.graph = g
        self.n = g.n
        self.values = list(values)
        self._sorted: dict[int, list[tuple[int, int]]] = {}

    @classmethod
    def draw(cls, g: Graph, seed: int) -> ExplicitRanks:
        rng = SplitMix64(seed)
        return cls(g, [rng.next_u64() for _ in range(g.m)])

    @classmethod
    def from_order(cls, g: Graph, order: list[int] | tuple[int, ...]) -> ExplicitRanks:
        """Ranks realizing a given permutation, ``order[0]`` being the lowest edge."""
        values = [0] * g.m
        for pos, e in enumerate(order):
            values[e] = pos
        if sorted(order) != list(range(g.m)):
            raise ValueError("order must be a permutation of the edge ids")
        return cls(g, values)

    def rank_of(self, e: int) -> RankValue:
        return RankValue(self.values[e], e)

    def order(self) -> list[int]:
        return sorted(range(self.graph.m), key=lambda e: (self.values[e], e))

    def endpoints(self, e: int) -> tuple[int, int]:
        return self.graph.edges[e]

    def lowest(self, v: int, i: int) -> tuple[int, int] | None:
        if i < 1:
            raise ValueError("lowest() is 1-indexed")
        row = self._sorted.get(v)
        if row is None:
            vals = self.values
            row = sorted(self.graph.adj[v], key=lambda t: (vals[t[1]], t[1]))
            self._sorted[v] = row
        return row[i - 1] if i <= len(row) else None


class _VertexState:
    __slots__ = ("level", "deg", "known", "counts", "by_rank", "exposed")

    def __init__(self, intervals: int):
        self.level = 0
        self.deg = -1
        self.known = 0  # exposed edges with rank below the frontier
        self.counts = [0] * intervals
        self.by_rank: list[tuple[int, int, int]] = []  # (rank, edge, neighbor), sorted
        self.exposed: dict[int, tuple[int, int]] = {}  # neighbor -> (rank, edge)


class LazyRanks:
    """Ranks revealed on demand through an adjacency-list query model.

    ``access`` supplies ``degree``, ``neighbor`` (1-based) and ``endpoints``
    and does its own query accounting. ``degree_bound`` may be any upper bound
    on the maximum degree; it defaults to ``n - 1`` so that no preprocessing
    pass is needed.
    """

    def __init__(self, access: ListModel, rng: SplitMix64, degree_bound: int | None = None):
        self.access = access
        self.rng = rng
        self.n = access.n
        bound = access.n - 1 if degree_bound is None else degree_bound
        self.ladder = IntervalLadder(bound)
        self._vertices: dict[int, _VertexState] = {}
        self._rank: dict[int, int] = {}

    def _state(self, v: int) -> _VertexState:
        st = self._vertices.get(v)
        if st is None:
            st = self._vertices[v] = _VertexState(self.ladder.levels + 1)
        return st

    def degree(self, v: int) -> int:
        st = self._state(v)
        if st.deg < 0:
            st.deg = self.access.degree(v)
        return st.deg

    def expose_next(self, v: int) -> None:
        st = self._state(v)
        k = st.level
        if k > self.ladder.levels:
            raise ContractViolation(f"vertex {v} has no interval left to open")
        d = self.degree(v)
        rng = self.rng
        size = binomial_sample(d, self.ladder.prob(k), rng)
        for idx in sample_indices(d, size, rng):
            u, e = self.access.neighbor(v, idx)
            if u in st.exposed:
                continue
            su = self._state(u)
            if su.level > k:
                # u already knows every edge it has in I_k, and this is not one
                continue
            r = self.ladder.draw(k, rng)
            self._rank[e] = r
            st.exposed[u] = (r, e)
            su.exposed[v] = (r, e)
            st.counts[k] += 1
            su.counts[k] += 1
            bisect.insort(st.by_rank, (r, e, u))
            bisect.insort(su.by_rank, (r, e, v))
        st.known += st.counts[k]
        st.level = k + 1

    def lowest(self, v: int, i: int) -> tuple[int, int] | None:
        """``(neighbor, edge)`` of the i-th lowest-rank edge at ``v``, or None past deg(v)."""
        if i < 1:
            raise ValueError("lowest() is 1-indexed")
        if i > self.degree(v):
            return None
        st = self._vertices[v]
        while st.known < i:
            self.expose_next(v)
        _, e, w = st.by_rank[i - 1]
        return w, e

    def rank_of(self, e: int) -> RankValue:
        try:
            return RankValue(self._rank[e], e)
        except KeyError:
            raise ContractViolation(f"rank of edge {e} has not been revealed") from None

    def endpoints(self, e: int) -> tuple[int, int]:
        return self.access.endpoints(e)

    # introspection, mostly for audits

    def level(self, v: int) -> int:
        st = self._vertices.get(v)
        return 0 if st is None else st.level

    def exposed(self, v: int) -> dict[int, RankValue]:
        st = self._vertices.get(v)
        if st is None:
            return {}
        return {u: RankValue(r, e) for u, (r, e) in st.exposed.items()}

    def count(self, v: int, i: int) -> int:
        st = self._vertices.get(v)
        return 0 if st is None else st.counts[i]

    def touched(self) -> list[int]:
        return sorted(self._vertices)

    def revealed(self) -> dict[int, int]:
        return dict(self._rank)


def new_explicit(g: Graph, seed: int) -> ExplicitRanks:
    return ExplicitRanks.draw(g, seed)


def new_lazy(g: Graph, seed: int, counter: AccessCounter | None = None,
             degree_bound: int | None = None) -> LazyRanks:
    return LazyRanks(ListAccess(g, counter), SplitMix64(seed), degree_bound)
