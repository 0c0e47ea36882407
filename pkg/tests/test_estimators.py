import math

import numpy as np
import pytest

from sublinear_match.estimators import (Constants, estimate_list_additive, estimate_list_multiplicative,
                                        estimate_matrix_additive, instance_seed, list_additive_run,
                                        list_multiplicative_run, matrix_additive_run, race_instances)
from sublinear_match.graph import Graph, gen_gnp, gen_structured
from sublinear_match.reference import exact_maximum_matching
from sublinear_match.rng import derive_seed, mix64

SMALL = Constants(multiplicative=8.0, additive=4.0)


def test_additive_sample_count():
    g = gen_structured("cycle", 10)
    run = list_additive_run(g, 0.2, 1)
    assert run.k == math.ceil(384 * math.log(10) / 0.04)
    assert matrix_additive_run(g, 0.2, 1).k == run.k


def test_multiplicative_sample_count_uses_non_singletons():
    g = gen_structured("star", 5).disjoint_union(Graph.from_edges(3, []))
    run = list_multiplicative_run(g, 0.5, 1)
    n_eff, max_deg, avg = 5, 4, 8 / 5
    assert run.n_eff == n_eff
    assert run.k == math.ceil(3072 * max_deg * math.log(n_eff) / avg / 0.25)
    # preprocessing read every degree
    assert run.cost.degree_queries == g.n


def test_constants_override():
    g = gen_structured("cycle", 10)
    assert list_additive_run(g, 0.5, 1, constants=SMALL).k == math.ceil(4 * math.log(10) / 0.25)


def test_sample_count_is_at_least_one():
    g = gen_structured("path", 2)
    run = list_multiplicative_run(g, 1.0, 1, constants=Constants(multiplicative=1e-9))
    assert run.k == 1


def test_multiplicative_on_edgeless_graph():
    est = estimate_list_multiplicative(Graph.from_edges(6, []), 0.5, 3)
    assert (est.mu_tilde, est.nu_tilde, est.samples) == (0.0, 0.0, 0)
    assert est.cost.degree_queries == 6


def test_outputs_are_clamped():
    est = estimate_list_additive(Graph.from_edges(8, []), 0.5, 3, constants=SMALL)
    assert est.raw_mu < 0 and est.mu_tilde == 0.0
    assert est.nu_tilde == est.raw_nu == 0.5 * 8 / 4
    est = estimate_matrix_additive(Graph.from_edges(8, []), 1.0, 3, constants=SMALL)
    assert est.mu_tilde == 0.0 and est.nu_tilde == 4.0


@pytest.mark.parametrize("eps", [0, -1, 1.01, float("nan"), "0.5"])
def test_eps_validation(eps):
    with pytest.raises(ValueError):
        list_additive_run(gen_structured("path", 4), eps, 1)


def test_matrix_rejects_tiny_eps():
    with pytest.raises(ValueError):
        matrix_additive_run(gen_structured("path", 4), 0.1, 1)


@pytest.mark.parametrize("build", [list_additive_run, list_multiplicative_run, matrix_additive_run])
def test_engines_agree(build):
    g = gen_gnp(10, 0.3, 4)
    a = build(g, 0.5, 8, engine="python", constants=SMALL).run()
    b = build(g, 0.5, 8, engine="kernel", constants=SMALL).run()
    assert a == b


def test_same_seed_same_estimate():
    g = gen_gnp(40, 0.1, 2)
    assert estimate_list_additive(g, 0.3, 5) == estimate_list_additive(g, 0.3, 5)
    assert estimate_list_additive(g, 0.3, 5) != estimate_list_additive(g, 0.3, 6)


def test_perfect_matching_is_exact():
    # every vertex is always matched, so f = 1
    g = gen_structured("perfect_matching", 20)
    est = estimate_list_multiplicative(g, 0.5, 1)
    assert est.matched_fraction == 1.0
    assert est.mu_tilde == pytest.approx(0.75 * 10)
    assert est.raw_nu == pytest.approx(1.25 * 20) and est.nu_tilde == 20.0


def test_additive_estimate_is_sandwiched():
    g = gen_gnp(16, 0.3, 1)
    mu = exact_maximum_matching(g)
    est = estimate_list_additive(g, 0.25, 11)
    assert mu / 2 - 0.25 * g.n <= est.mu_tilde <= mu


def _one_at_a_time(run_factory, budgets):
    """Reference stepping: charge samples one by one until the budget is met."""
    run = run_factory()
    rows = run.sampler.rows(0, run.k)
    cost = run.cost.total
    done = 0
    out = []
    for b in budgets:
        while done < run.k and cost < b:
            cost += int(rows[done, 5] + rows[done, 6] + rows[done, 8])
            done += 1
        out.append((done, cost))
    return out


@pytest.mark.parametrize("build", [list_additive_run, list_multiplicative_run, matrix_additive_run])
def test_advance_cuts_exactly_at_budget(build):
    g = gen_gnp(12, 0.3, 7)
    factory = lambda: build(g, 0.5, 3, constants=SMALL)  # noqa: E731
    budgets = [1, 50, 51, 400, 1000, 1001, 5000, 10**6]
    run = factory()
    got = []
    for b in budgets:
        run.advance(b)
        got.append((run.done_samples, run.cost.total))
    assert got == _one_at_a_time(factory, budgets)
    assert run.finished and run.result() == factory().run()


def test_result_before_finish_raises():
    run = list_additive_run(gen_structured("path", 10), 0.5, 1)
    with pytest.raises(RuntimeError):
        run.result()


def test_instance_seeds():
    assert instance_seed(12, 0) == 12
    assert instance_seed(12, 3) == derive_seed(mix64(12), 3)
    assert len({instance_seed(12, i) for i in range(100)}) == 100


def test_single_instance_race_is_a_plain_run():
    g = gen_gnp(30, 0.1, 1)
    res = race_instances(lambda s: list_additive_run(g, 0.5, s), 1, 21)
    assert res.winner == 0
    assert res.estimate == estimate_list_additive(g, 0.5, 21)


def test_race_stops_everyone_but_the_winner():
    g = gen_gnp(30, 0.1, 1)
    res = race_instances(lambda s: list_additive_run(g, 0.5, s, constants=SMALL), 6, 4, quantum=16)
    finals = [list_additive_run(g, 0.5, instance_seed(4, i), constants=SMALL).run().cost.total for i in range(6)]
    # only the winner has spent its full cost; everyone else was stopped short
    assert res.instance_costs[res.winner] == finals[res.winner]
    assert all(res.instance_costs[i] < finals[i] for i in range(6) if i != res.winner)
    assert max(res.instance_costs) <= res.rounds * 16 + max(finals)
    assert res.estimate == list_additive_run(g, 0.5, instance_seed(4, res.winner), constants=SMALL).run()
    assert res.total_cost == sum(res.instance_costs)
    assert race_instances(lambda s: list_additive_run(g, 0.5, s, constants=SMALL), 6, 4, quantum=16) == res


def test_race_argument_checks():
    g = gen_structured("path", 4)
    with pytest.raises(ValueError):
        race_instances(lambda s: list_additive_run(g, 0.5, s), 0, 1)
    with pytest.raises(ValueError):
        race_instances(lambda s: list_additive_run(g, 0.5, s), 2, 1, quantum=0)


def test_estimate_reports_instrumentation():
    g = gen_gnp(50, 0.08, 3)
    est = estimate_list_additive(g, 0.5, 2, constants=SMALL)
    assert est.oracle_calls > 0 and est.max_path >= 1
    assert est.cost.total == est.cost.degree_queries + est.cost.neighbor_queries
    assert np.isclose(est.raw_mu, est.matched_fraction * 50 / 2 - 0.5 * 50 / 2)
