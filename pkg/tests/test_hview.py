import math

import pytest
from hypothesis import given, settings, strategies as st

from sublinear_match.graph import AccessCounter, Graph, gen_structured
from sublinear_match.hview import HView, h_degree, h_neighbor, v1_matched_within_v1
from sublinear_match.oracle import OracleSession
from sublinear_match.ranks import ExplicitRanks
from sublinear_match.reference import greedy_matching

from strategies import graphs


def _h_edges(g: Graph, s: int) -> set[tuple[int, int]]:
    n = g.n
    out = set()
    for v in range(n):
        for j in range(n):
            if g.has_edge(v, j):
                out.add((min(v, j), max(v, j)))
                out.add((n + min(v, j), n + max(v, j)))
            else:
                out.add((v, n + j))
        out.update((n + v, 2 * n + v * s + t) for t in range(s))
    return out


@settings(max_examples=40)
@given(graphs(max_n=6), st.sampled_from([0.5, 1.0]))
def test_view_lists_exactly_the_edges_of_h(g, eps):
    if eps * g.n < 1:
        return
    h = HView(g, eps)
    seen = set()
    for x in range(h.n):
        for i in range(1, h.degree(x) + 1):
            y, e = h.neighbor(x, i)
            seen.add((min(x, y), max(x, y)))
            assert h.endpoints(e) == (min(x, y), max(x, y))
    assert seen == _h_edges(g, h.s)


def test_block_sizes_and_degrees():
    g = gen_structured("path", 5)
    h = HView(g, 0.3)
    assert h.s == math.ceil(10 * 5 / 0.3)
    assert h.n == 10 + 5 * h.s
    assert [h.part(x) for x in (0, 4, 5, 9, 10, h.n - 1)] == ["V1", "V1", "V2", "V2", "U", "U"]
    assert h_degree(h, 0) == 5 and h_degree(h, 5) == 5 + h.s and h_degree(h, 10) == 1
    assert h.owner(10) == 0 and h.owner(h.n - 1) == 4 and h.owner(7) == 2


def test_each_entry_costs_at_most_one_probe():
    g = gen_structured("cycle", 4)
    counter = AccessCounter()
    h = HView(g, 0.5, counter)
    for x in range(h.n):
        for i in range(1, h.degree(x) + 1):
            before = counter.pair_queries
            h_neighbor(h, x, i)
            assert counter.pair_queries - before <= 1
    # only V1/V2 positions up to n consult G
    assert counter.pair_queries == 2 * g.n * g.n


def test_twin_link_position():
    g = gen_structured("star", 4)
    h = HView(g, 1.0)
    for v in range(4):
        assert h_neighbor(h, v, v + 1) == 4 + v
        assert h_neighbor(h, 4 + v, v + 1) == v


@pytest.mark.parametrize("eps", [0.0, -0.1, 1.5])
def test_rejects_bad_eps(eps):
    with pytest.raises(ValueError):
        HView(gen_structured("path", 4), eps)


def test_rejects_eps_below_one_over_n():
    with pytest.raises(ValueError):
        HView(gen_structured("path", 4), 0.2)
    with pytest.raises(ValueError):
        HView(Graph.from_edges(0, []), 0.5)


def test_position_out_of_range():
    h = HView(gen_structured("path", 3), 1.0)
    with pytest.raises(IndexError):
        h.neighbor(0, 4)
    with pytest.raises(IndexError):
        h.part(h.n)


def test_v1_oracle_agrees_with_greedy_on_h():
    g = gen_structured("path", 3)
    h = HView(g, 1.0)
    edges = sorted(_h_edges(g, h.s))
    hg = Graph.from_edges(h.n, edges)
    for seed in range(10):
        matched, session = v1_matched_within_v1(h, 0, seed)
        assert matched == (session.partner is not None and session.partner < g.n)
    ranks = ExplicitRanks.draw(hg, 3)
    truth = greedy_matching(hg, ranks)
    assert OracleSession(ranks).vertex_oracle(0) == truth.matched[0]


def test_v1_oracle_rejects_non_v1_vertex():
    h = HView(gen_structured("path", 3), 1.0)
    with pytest.raises(IndexError):
        v1_matched_within_v1(h, 3, 0)
