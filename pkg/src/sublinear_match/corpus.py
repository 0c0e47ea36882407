"""Named small graphs used by the verification suites and the acceptance tests."""

from __future__ import annotations

from functools import lru_cache

import networkx as nx

from .graph import Graph, gen_complete_bipartite, gen_gnp, gen_structured

__all__ = [
    "connected_graphs",
    "estimator_fixtures",
    "full_corpus",
    "path_cycle_star_fixtures",
    "petersen",
]


def _from_nx(G: nx.Graph) -> Graph:
    nodes = sorted(G.nodes())
    index = {v: i for i, v in enumerate(nodes)}
    return Graph.from_edges(len(nodes), sorted((index[a], index[b]) for a, b in G.edges()))


@lru_cache(maxsize=None)
def connected_graphs(max_edges: int) -> tuple[tuple[str, Graph], ...]:
    """Every connected graph with 1..max_edges edges, one per isomorphism class.

    Drawn from the graph atlas (all graphs on up to seven vertices), which
    covers every connected graph with at most six edges.
    """
    if not 1 <= max_edges <= 6:
        raise ValueError("the atlas only covers connected graphs with at most 6 edges")
    out = []
    for idx, G in enumerate(nx.graph_atlas_g()):
        m = G.number_of_edges()
        if 1 <= m <= max_edges and nx.is_connected(G):
            out.append((f"atlas{idx}", _from_nx(G)))
    return tuple(out)


def petersen() -> Graph:
    return _from_nx(nx.petersen_graph())


def path_cycle_star_fixtures(max_edges: int) -> tuple[tuple[str, Graph], ...]:
    out: list[tuple[str, Graph]] = [("triangle", gen_structured("cycle", 3))]
    for m in range(1, max_edges + 1):
        out.append((f"path{m + 1}", gen_structured("path", m + 1)))
        out.append((f"star{m + 1}", gen_structured("star", m + 1)))
        if m >= 4:
            out.append((f"cycle{m}", gen_structured("cycle", m)))
    return tuple(out)


@lru_cache(maxsize=None)
def estimator_fixtures() -> tuple[tuple[str, Graph], ...]:
    """Ten graphs on at most 18 vertices with a spread of structure and density."""
    tri_p4_k2 = gen_structured("cycle", 3).disjoint_union(gen_structured("path", 4)).disjoint_union(
        gen_structured("path", 2))
    return (
        ("cycle5", gen_structured("cycle", 5)),
        ("petersen", petersen()),
        ("k3_4", gen_complete_bipartite(3, 4)),
        ("path12", gen_structured("path", 12)),
        ("cycle11", gen_structured("cycle", 11)),
        ("pm16", gen_structured("perfect_matching", 16)),
        ("star9", gen_structured("star", 9)),
        ("gnp16", gen_gnp(16, 0.3, 1)),
        ("gnp18", gen_gnp(18, 0.2, 2)),
        ("tri_p4_k2", tri_p4_k2),
    )


def full_corpus() -> tuple[tuple[str, Graph], ...]:
    """Atlas graphs up to six edges, the path/cycle/star fixtures and the estimator fixtures."""
    return connected_graphs(6) + path_cycle_star_fixtures(7) + estimator_fixtures()
