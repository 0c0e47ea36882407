"""Adjacency-list view of the virtual graph H built from adjacency-matrix access to G.

H has vertex set ``V1 + V2 + U_0 + ... + U_{n-1}``:

* ``V1 = [0, n)`` and ``V2 = [n, 2n)`` are two copies of V;
* ``U_v = [2n + v*s, 2n + (v+1)*s)`` is a block of ``s = ceil(10 n / eps)``
  degree-one vertices hanging off ``v``'s copy in V2.

Position ``i <= n`` of a V1 vertex ``v`` holds ``(i-1)`` in V1 if
``{v, i-1}`` is an edge of G and ``(i-1)`` in V2 otherwise; V2 vertices are
wired the other way round, and their positions ``n+1 .. n+s`` list ``U_v``.
Position ``v+1`` therefore links ``v``'s two copies. Degrees are fixed by
construction and every list entry costs at most one pair probe to G. H is
never materialized.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .graph import AccessCounter, Graph, pair_query
from .oracle import OracleSession
from .ranks import LazyRanks
from .rng import SplitMix64

__all__ = ["HView", "h_degree", "h_neighbor", "v1_matched_within_v1"]


def _as_fraction(eps: float) -> Fraction:
    return Fraction(eps).limit_denominator(10**9)


class HView:
    def __init__(self, g: Graph, eps: float, counter: AccessCounter | None = None):
        n = g.n
        if n < 1:
            raise ValueError("the reduction needs a non-empty vertex set")
        if not 0 < eps <= 1:
            raise ValueError("eps must lie in (0, 1]")
        frac = _as_fraction(eps)
        if frac * n < 1:
            raise ValueError(f"eps must be at least 1/n = 1/{n}")
        self.graph = g
        self.eps = eps
        self.base_n = n
        self.s = math.ceil(Fraction(10 * n) / frac)
        self.n = 2 * n + n * self.s  # vertex count of H
        self.max_degree = n + self.s
        self.counter = counter if counter is not None else AccessCounter()

    def part(self, x: int) -> str:
        if not 0 <= x < self.n:
            raise IndexError(f"H-vertex {x} out of range")
        if x < self.base_n:
            return "V1"
        if x < 2 * self.base_n:
            return "V2"
        return "U"

    def owner(self, x: int) -> int:
        """The G-vertex a copy or absorber belongs to."""
        n = self.base_n
        if x < 2 * n:
            return x % n
        return (x - 2 * n) // self.s

    def edge_key(self, a: int, b: int) -> int:
        return a * self.n + b if a < b else b * self.n + a

    def endpoints(self, e: int) -> tuple[int, int]:
        return divmod(e, self.n)

    def degree(self, x: int) -> int:
        part = self.part(x)
        self.counter.degree_queries += 1
        if part == "V1":
            return self.base_n
        if part == "V2":
            return self.base_n + self.s
        return 1

    def neighbor(self, x: int, i: int) -> tuple[int, int]:
        """``(H-neighbor, H-edge id)`` at 1-based position ``i``; at most one pair probe."""
        part = self.part(x)
        n = self.base_n
        deg = n if part == "V1" else n + self.s if part == "V2" else 1
        if not 1 <= i <= deg:
            raise IndexError(f"position {i} out of range for H-vertex {x} of degree {deg}")
        self.counter.neighbor_queries += 1
        if part == "U":
            y = n + self.owner(x)
        elif i > n:
            y = 2 * n + (x - n) * self.s + (i - n - 1)
        else:
            v, j = x % n, i - 1
            same_side = pair_query(self.graph, v, j, self.counter)
            if part == "V1":
                y = j if same_side else n + j
            else:
                y = n + j if same_side else j
        return y, self.edge_key(x, y)


def h_degree(h: HView, x: int) -> int:
    return h.degree(x)


def h_neighbor(h: HView, x: int, i: int) -> int:
    """Neighbor at position ``i``; probes are charged to ``h.counter``."""
    return h.neighbor(x, i)[0]


def v1_matched_within_v1(h: HView, v: int, seed: int | SplitMix64) -> tuple[bool, OracleSession]:
    """Run a fresh lazy-rank vertex oracle on ``v``'s V1 copy.

    True iff that copy is matched in GMM(H, pi) to another V1 vertex; the
    finished session is returned for its instrumentation.
    """
    if not 0 <= v < h.base_n:
        raise IndexError(f"{v} is not a V1 vertex")
    rng = seed if isinstance(seed, SplitMix64) else SplitMix64(seed)
    ranks = LazyRanks(h, rng, degree_bound=h.max_degree)
    session = OracleSession(ranks, n_vertices=h.n, counter=h.counter)
    matched = session.vertex_oracle(v)
    return matched and session.partner < h.base_n, session
