"""Global reference implementations used to validate the local oracles.

Everything here looks at the whole graph: sequential and parallel greedy
maximal matching, exhaustive permutation enumeration, and exact maximum
matching / minimum vertex cover by branch-and-bound for small graphs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .graph import Graph, GraphStats
from .ranks import ExplicitRanks

__all__ = [
    "BudgetError",
    "Matching",
    "PermutationRecord",
    "RoundProfile",
    "enumerate_permutation_behavior",
    "exact_maximum_matching",
    "exact_min_vertex_cover",
    "gmm_size_distribution",
    "greedy_matching",
    "parallel_rounds",
    "vizing_floor",
]

EXACT_MAX_N = 24
ENUMERATION_MAX_M = 8


class BudgetError(ValueError):
    """Input exceeds the size an exhaustive routine is willing to handle."""


@dataclass(frozen=True)
class Matching:
    edges: frozenset[int]
    matched: tuple[bool, ...]

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class RoundProfile:
    rho: int
    round_of_edge: tuple[int, ...]
    matching: Matching


@dataclass(frozen=True)
class PermutationRecord:
    order: tuple[int, ...]
    matching: frozenset[int]
    matched_vertices: frozenset[int]
    rho: int


def greedy_matching(g: Graph, ranks) -> Matching:
    """Scan edges by increasing rank and keep each one whose endpoints are both free."""
    keys = [tuple(ranks.rank_of(e)) for e in range(g.m)]
    matched = [False] * g.n
    chosen = []
    for e in sorted(range(g.m), key=keys.__getitem__):
        u, v = g.edges[e]
        if not matched[u] and not matched[v]:
            matched[u] = matched[v] = True
            chosen.append(e)
    return Matching(frozenset(chosen), tuple(matched))


def parallel_rounds(g: Graph, ranks) -> RoundProfile:
    """Local-minimum rounds until the graph is empty.

    Each round every live edge whose rank beats all live edges sharing an
    endpoint joins the matching; its endpoints, and every edge touching
    them, are removed. Rounds scan all live edges (O(m) per round).
    """
    m = g.m
    if m == 0:
        return RoundProfile(0, (), Matching(frozenset(), (False,) * g.n))
    keys = [tuple(ranks.rank_of(e)) for e in range(m)]
    pos = np.empty(m, dtype=np.int64)
    pos[sorted(range(m), key=keys.__getitem__)] = np.arange(m)
    ends = np.asarray(g.edges, dtype=np.int64)
    u, v = ends[:, 0], ends[:, 1]
    live = np.ones(m, dtype=bool)
    alive_vertex = np.ones(g.n, dtype=bool)
    removed_in = np.zeros(m, dtype=np.int64)
    in_matching = np.zeros(m, dtype=bool)
    rnd = 0
    sentinel = np.iinfo(np.int64).max
    while live.any():
        rnd += 1
        best = np.full(g.n, sentinel, dtype=np.int64)
        idx = np.flatnonzero(live)
        np.minimum.at(best, u[idx], pos[idx])
        np.minimum.at(best, v[idx], pos[idx])
        winners = idx[(best[u[idx]] == pos[idx]) & (best[v[idx]] == pos[idx])]
        in_matching[winners] = True
        alive_vertex[u[winners]] = False
        alive_vertex[v[winners]] = False
        dead = idx[~(alive_vertex[u[idx]] & alive_vertex[v[idx]])]
        live[dead] = False
        removed_in[dead] = rnd
    chosen = np.flatnonzero(in_matching).tolist()
    matched = [False] * g.n
    for e in chosen:
        a, b = g.edges[e]
        matched[a] = matched[b] = True
    return RoundProfile(rnd, tuple(removed_in.tolist()), Matching(frozenset(chosen), tuple(matched)))


def _neighbor_masks(g: Graph) -> list[int]:
    masks = [0] * g.n
    for a, b in g.edges:
        masks[a] |= 1 << b
        masks[b] |= 1 << a
    return masks


def _check_budget(g: Graph) -> None:
    if g.n > EXACT_MAX_N:
        raise BudgetError(f"exact oracles are limited to n <= {EXACT_MAX_N}, got n={g.n}")


def exact_maximum_matching(g: Graph) -> int:
    """mu(G) by branching on the lowest live vertex: leave it out, or match it to a live neighbor."""
    _check_budget(g)
    nbrs = _neighbor_masks(g)

    @lru_cache(maxsize=None)
    def best(live: int) -> int:
        # drop vertices with no live neighbor
        while live:
            low = live & -live
            v = low.bit_length() - 1
            if nbrs[v] & live:
                break
            live ^= low
        if not live:
            return 0
        v = (live & -live).bit_length() - 1
        rest = live & ~(1 << v)
        top = best(rest)
        if top >= bin(live).count("1") // 2:
            return top
        cand = nbrs[v] & rest
        while cand:
            low = cand & -cand
            top = max(top, 1 + best(rest & ~low))
            cand ^= low
        return top

    return best((1 << g.n) - 1)


def exact_min_vertex_cover(g: Graph) -> int:
    """nu(G) by branching on an uncovered edge's endpoints (max-degree endpoint first)."""
    _check_budget(g)
    nbrs = _neighbor_masks(g)

    @lru_cache(maxsize=None)
    def cover(live: int) -> int:
        best_v, best_deg = -1, 0
        rest = live
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            deg = bin(nbrs[v] & live).count("1")
            if deg > best_deg:
                best_v, best_deg = v, deg
            rest ^= low
        if best_deg == 0:
            return 0
        if best_deg == 1:
            # all live edges are disjoint
            return sum(bin(nbrs[v] & live).count("1") for v in _bits(live)) // 2
        v = best_v
        take_v = 1 + cover(live & ~(1 << v))
        nv = nbrs[v] & live
        take_nbrs = bin(nv).count("1") + cover(live & ~nv & ~(1 << v))
        return min(take_v, take_nbrs)

    return cover((1 << g.n) - 1)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def enumerate_permutation_behavior(g: Graph) -> list[PermutationRecord]:
    """GMM output and round count for every one of the m! edge orders."""
    if g.m > ENUMERATION_MAX_M:
        raise BudgetError(f"enumeration is limited to m <= {ENUMERATION_MAX_M}, got m={g.m}")
    records = []
    for order in itertools.permutations(range(g.m)):
        ranks = ExplicitRanks.from_order(g, order)
        gm = greedy_matching(g, ranks)
        rho = parallel_rounds(g, ranks).rho
        verts = frozenset(x for e in gm.edges for x in g.edges[e])
        records.append(PermutationRecord(order, gm.edges, verts, rho))
    return records


def gmm_size_distribution(g: Graph) -> dict[int, Fraction]:
    """Exact law of |GMM(G, pi)| under a uniform permutation."""
    if g.m > ENUMERATION_MAX_M:
        raise BudgetError(f"enumeration is limited to m <= {ENUMERATION_MAX_M}, got m={g.m}")
    tally: dict[int, int] = {}
    for order in itertools.permutations(range(g.m)):
        size = len(greedy_matching(g, ExplicitRanks.from_order(g, order)))
        tally[size] = tally.get(size, 0) + 1
    total = math.factorial(g.m)
    return {k: Fraction(c, total) for k, c in sorted(tally.items())}


def vizing_floor(st: GraphStats, n: int) -> Fraction:
    """Lower bound n * avg_degree / (4 * max_degree) on mu(G)."""
    if st.max_degree == 0:
        return Fraction(0)
    return Fraction(n) * st.avg_degree / (4 * st.max_degree)
