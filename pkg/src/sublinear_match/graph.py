"""Graphs, generators, edge-list I/O and the instrumented query models.

Vertex and edge ids are dense 0-based integers. Adjacency positions in the
query API are 1-based, so ``neighbor_query(g, v, 1, c)`` is the first entry
of ``v``'s list.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import BinaryIO, Iterable, Sequence, TextIO

import numpy as np

__all__ = [
    "AccessCounter",
    "EdgeListError",
    "Graph",
    "GraphStats",
    "ListAccess",
    "degree_query",
    "dump_edge_list",
    "gen_complete_bipartite",
    "gen_gnp",
    "gen_structured",
    "load_edge_list",
    "neighbor_query",
    "pair_query",
    "stats",
]


class EdgeListError(ValueError):
    """Raised when an edge-list file cannot be parsed into a simple graph."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class AccessCounter:
    """Tally of queries charged against a query model."""

    degree_queries: int = 0
    neighbor_queries: int = 0
    pair_queries: int = 0

    @property
    def total(self) -> int:
        return self.degree_queries + self.neighbor_queries + self.pair_queries

    def snapshot(self) -> AccessCounter:
        return AccessCounter(self.degree_queries, self.neighbor_queries, self.pair_queries)

    def add(self, other: AccessCounter) -> None:
        self.degree_queries += other.degree_queries
        self.neighbor_queries += other.neighbor_queries
        self.pair_queries += other.pair_queries


@dataclass(frozen=True)
class GraphStats:
    avg_degree: Fraction
    max_degree: int


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph.

    ``adj[v]`` is the fixed, arbitrarily ordered list of ``(neighbor, edge id)``
    pairs for ``v``; ``edges[e]`` holds the endpoints of edge ``e`` with the
    smaller id first.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    adj: tuple[tuple[tuple[int, int], ...], ...]
    _index: dict[tuple[int, int], int] = field(repr=False)

    @property
    def m(self) -> int:
        return len(self.edges)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> Graph:
        """Build a graph; adjacency order follows the order of ``edges``."""
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        canon: list[tuple[int, int]] = []
        index: dict[tuple[int, int], int] = {}
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            key = (u, v) if u < v else (v, u)
            if key in index:
                raise ValueError(f"duplicate edge {key}")
            e = len(canon)
            index[key] = e
            canon.append(key)
            adj[u].append((v, e))
            adj[v].append((u, e))
        return cls(n, tuple(canon), tuple(tuple(a) for a in adj), index)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._index or (v, u) in self._index

    def edge_id(self, u: int, v: int) -> int:
        return self._index[(u, v) if u < v else (v, u)]

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(indptr, neighbors, edge_ids)`` arrays preserving adjacency order."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        for v in range(self.n):
            indptr[v + 1] = indptr[v] + len(self.adj[v])
        nbr = np.fromiter((w for a in self.adj for w, _ in a), dtype=np.int64, count=2 * self.m)
        eid = np.fromiter((e for a in self.adj for _, e in a), dtype=np.int64, count=2 * self.m)
        return indptr, nbr, eid

    def dense_adjacency(self) -> np.ndarray:
        mat = np.zeros((self.n, self.n), dtype=np.bool_)
        for u, v in self.edges:
            mat[u, v] = mat[v, u] = True
        return mat

    def disjoint_union(self, other: Graph) -> Graph:
        shift = self.n
        return Graph.from_edges(
            self.n + other.n,
            list(self.edges) + [(u + shift, v + shift) for u, v in other.edges],
        )

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def stats(g: Graph) -> GraphStats:
    if g.n < 1:
        raise ValueError("stats need at least one vertex")
    return GraphStats(Fraction(2 * g.m, g.n), max((len(a) for a in g.adj), default=0))


# -- query models -------------------------------------------------------------


def _check_vertex(g: Graph, v: int) -> None:
    if not 0 <= v < g.n:
        raise IndexError(f"vertex {v} out of range for n={g.n}")


def degree_query(g: Graph, v: int, counter: AccessCounter) -> int:
    _check_vertex(g, v)
    counter.degree_queries += 1
    return len(g.adj[v])


def neighbor_query(g: Graph, v: int, i: int, counter: AccessCounter) -> tuple[int, int]:
    """The ``i``-th (1-based) entry of ``v``'s adjacency list as ``(neighbor, edge id)``."""
    _check_vertex(g, v)
    row = g.adj[v]
    if not 1 <= i <= len(row):
        raise IndexError(f"neighbor index {i} out of range for deg({v})={len(row)}")
    counter.neighbor_queries += 1
    return row[i - 1]


def pair_query(g: Graph, u: int, v: int, counter: AccessCounter) -> bool:
    _check_vertex(g, u)
    _check_vertex(g, v)
    counter.pair_queries += 1
    # u == v falls through to False: graphs are simple
    return g.has_edge(u, v)


class ListAccess:
    """Adjacency-list view of a graph that charges every probe to ``counter``."""

    def __init__(self, g: Graph, counter: AccessCounter | None = None):
        self.graph = g
        self.counter = counter if counter is not None else AccessCounter()
        self.n = g.n

    def degree(self, v: int) -> int:
        return degree_query(self.graph, v, self.counter)

    def neighbor(self, v: int, i: int) -> tuple[int, int]:
        return neighbor_query(self.graph, v, i, self.counter)

    def endpoints(self, e: int) -> tuple[int, int]:
        return self.graph.edges[e]


# -- edge-list format -----------------------------------------------------------


def load_edge_list(source: str | bytes | TextIO | BinaryIO) -> Graph:
    """Parse ``"n m"`` followed by ``m`` lines ``"u v"`` (0-indexed).

    Adjacency order is file order. Every defect is reported with its 1-based
    line number.
    """
    if isinstance(source, bytes):
        text = source.decode()
    elif isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode() if isinstance(raw, bytes) else raw
    lines = [(i + 1, ln.split()) for i, ln in enumerate(io.StringIO(text)) if ln.strip()]
    if not lines:
        raise EdgeListError(1, "missing header 'n m'")
    lineno, header = lines[0]
    n, m = _parse_ints(lineno, header, "header 'n m'")
    if n < 0 or m < 0:
        raise EdgeListError(lineno, "negative count in header")
    body = lines[1:]
    if len(body) != m:
        raise EdgeListError(body[m][0] if len(body) > m else lineno,
                            f"header declares {m} edges, found {len(body)}")
    seen: set[tuple[int, int]] = set()
    edges = []
    for lineno, parts in body:
        u, v = _parse_ints(lineno, parts, "edge 'u v'")
        if not (0 <= u < n and 0 <= v < n):
            raise EdgeListError(lineno, f"vertex id out of range in ({u}, {v})")
        if u == v:
            raise EdgeListError(lineno, f"self-loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise EdgeListError(lineno, f"duplicate edge {key}")
        seen.add(key)
        edges.append((u, v))
    return Graph.from_edges(n, edges)


def _parse_ints(lineno: int, parts: list[str], what: str) -> tuple[int, int]:
    if len(parts) != 2:
        raise EdgeListError(lineno, f"expected {what}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise EdgeListError(lineno, f"expected {what}") from None


def dump_edge_list(g: Graph) -> str:
    out = [f"{g.n} {g.m}"]
    out.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(out) + "\n"


# -- generators -------------------------------------------------------------------


def _philox(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def gen_gnp(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p), deterministic per seed.

    Draws the edge count from Binomial(n(n-1)/2, p) and then a uniform subset
    of that size, which is the same law as independent coin flips per pair.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    pairs = n * (n - 1) // 2
    if pairs == 0 or p == 0.0:
        return Graph.from_edges(n, [])
    rng = _philox(seed)
    m = int(rng.binomial(pairs, p))
    idx = np.sort(rng.choice(pairs, size=m, replace=False)) if m < pairs else np.arange(pairs)
    # row u starts at offset u*(2n-u-1)/2 in the lexicographic (u < v) order
    rows = np.arange(n, dtype=np.int64)
    offsets = rows * (2 * n - rows - 1) // 2
    u = np.searchsorted(offsets, idx, side="right") - 1
    v = idx - offsets[u] + u + 1
    return Graph.from_edges(n, zip(u.tolist(), v.tolist()))


def gen_complete_bipartite(a: int, b: int) -> Graph:
    if a < 1 or b < 1:
        raise ValueError("both sides of K_{a,b} need at least one vertex")
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def gen_structured(kind: str, n: int) -> Graph:
    """``path``, ``cycle``, ``star`` (center 0) or ``perfect_matching`` on n vertices."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if kind == "path":
        edges = [(i, i + 1) for i in range(n - 1)]
    elif kind == "cycle":
        if n < 3:
            raise ValueError("a cycle needs n >= 3")
        edges = [(i, i + 1) for i in range(n - 1)] + [(n - 1, 0)]
    elif kind == "star":
        edges = [(0, i) for i in range(1, n)]
    elif kind == "perfect_matching":
        if n % 2:
            raise ValueError("a perfect matching needs even n")
        edges = [(2 * i, 2 * i + 1) for i in range(n // 2)]
    else:
        raise ValueError(f"unknown graph kind {kind!r}")
    return Graph.from_edges(n, edges)
