from __future__ import annotations

import numpy as np
import pytest

from prokrast.agent import choose_edge, exact_ratio, simulate
from prokrast.bounds import (
    H_MARGIN,
    MonotoneCondition,
    check_claim1,
    check_theorem6,
    monotone_bound,
    t5_node,
    theorem5_graph,
    theorem5_growth,
    theorem5_params,
    theorem6_condition,
)
from prokrast.distributions import EqualRevenue, Finite, HalfNormal, Uniform, point_mass
from prokrast.errors import ConditionUnsatisfiable, NoValidFraction, PreconditionFailed, PropertyViolation
from prokrast.graph import build_graph, distances, is_bounded_distance
from prokrast.random_graphs import random_finite, random_monotone_distance
from prokrast.scenarios import EXAMPLE_DIST, homework_graph, marathon_graph, ski_graph, ski_upper_bound


def test_bounded_distance_marathon_and_single_edge():
    rep = check_claim1(marathon_graph(30, 5), EXAMPLE_DIST, trials=10_000, seed=1)
    assert rep.passed and rep.max_ratio <= 30
    g = build_graph({
        "n": 1, "nodes": [{"id": "s", "layer": 1}, {"id": "t", "layer": 2}],
        "edges": [{"from": "s", "to": "t", "w": 2.0}], "start": "s", "target": "t",
    })
    assert check_claim1(g, EXAMPLE_DIST, trials=10).max_total == 2.0


def test_bounded_distance_check_rejects_unbounded_graph():
    with pytest.raises(PreconditionFailed):
        check_claim1(homework_graph(4), EXAMPLE_DIST, trials=10)


def test_random_walk_params_two_point():
    p = theorem5_params(EXAMPLE_DIST)
    assert (p.b_star, p.alpha, p.beta, p.delta) == (3.0, 1, 1, 0.9)
    assert p.H() == pytest.approx(1.08)
    assert p.gamma == pytest.approx(-1 / 3)


def test_random_walk_params_failure_and_plateau():
    with pytest.raises(NoValidFraction):
        theorem5_params(Uniform(1, 2))
    p = theorem5_params(EqualRevenue(1.5, 10))
    assert p.b_star == 1.5 and p.survival == pytest.approx(1.0)
    p.check()


def test_random_walk_invariants_on_random_distributions(rng):
    found = 0
    for _ in range(100):
        d = random_finite(rng, 3, hi=6)
        try:
            p = theorem5_params(d)
        except NoValidFraction:
            continue
        found += 1
        assert 1 / p.b_star < p.beta / (p.alpha + p.beta) < p.survival
        assert p.H() > 1 + H_MARGIN
        assert p.gamma < 0
    assert found > 10


def test_random_walk_graph_distances_and_boundedness():
    p = theorem5_params(EXAMPLE_DIST)
    g = theorem5_graph(p, 12)
    d = distances(g)
    for v in g.nodes:
        if v != g.target:
            j = int(v.split("_")[1])
            assert d[v] == pytest.approx(p.delta**j, rel=1e-12)
    assert is_bounded_distance(g)


def test_random_walk_agent_preferences_on_one_layer():
    p = theorem5_params(EXAMPLE_DIST)
    n = 30
    g = theorem5_graph(p, n)
    dt = distances(g)
    i = 15
    middle = [v for v in g.layer_nodes(i) if p.alpha <= int(v.split("_")[1]) <= (n - 1) * p.beta]
    assert middle
    for v in middle:
        j = int(v.split("_")[1])
        down = t5_node(i + 1, j - p.alpha)
        up = t5_node(i + 1, j + p.beta)
        assert g.edges[choose_edge(g, dt, v, p.b_star)].dst == down
        assert g.edges[choose_edge(g, dt, v, 1.0)].dst == up
        # strict preferences: perturbing the bias slightly keeps both choices
        assert g.edges[choose_edge(g, dt, v, p.b_star * (1 - 1e-6))].dst == down


def test_random_walk_empirical_drift():
    p = theorem5_params(EXAMPLE_DIST)
    n = 400
    sim = simulate(theorem5_graph(p, n), EXAMPLE_DIST, seed=4, trials=400)
    idx = np.array([[int(v.split("_")[1]) if v != "t" else -1 for v in sim.nodes]])[0]
    j = idx[sim.paths[:, :-1]]
    jn = idx[sim.paths[:, 1:-1]]
    mid = (j[:, :-1] >= p.alpha) & (j[:, :-1] <= (n - 1) * p.beta)
    steps = (jn - j[:, :-1])[mid]
    assert steps.size >= 100_000
    assert steps.mean() <= p.gamma + 0.05


def test_random_walk_linear_growth_small():
    fit = theorem5_growth(EXAMPLE_DIST, ns=(25, 50, 100), trials=200, seed=1)
    assert fit.slope > 0
    assert fit.r_squared >= 0.95


def test_monotone_condition_examples():
    c = theorem6_condition(Uniform(1, 2))
    assert (c.beta_m, c.delta_m, c.bound) == (1.0, 1.0, 2.0)
    c = theorem6_condition(EXAMPLE_DIST)
    assert c.bound == pytest.approx(3.0)
    # The hand-picked pair (1/3, 1) is admissible and gives 4; the optimizer never does worse.
    assert monotone_bound(1 / 3, 1.0) == 4.0
    assert c.bound <= 4.0
    with pytest.raises(ConditionUnsatisfiable):
        theorem6_condition(point_mass(3.0))


def test_monotone_condition_holds_on_grid():
    for d in (Uniform(1, 2), Uniform(1, 3), EXAMPLE_DIST, HalfNormal(), Finite.of({1: 0.25, 1.5: 0.25, 2: 0.5})):
        c = theorem6_condition(d)
        xs = np.linspace(1, 1 + c.delta_m, 5001)[1:]
        below = np.asarray(d.cdf(xs)) - np.array([d.mass_at(float(x)) for x in xs])
        assert np.all(below >= c.beta_m * (xs - 1) - 1e-12)


def test_monotone_check_ski():
    g = ski_graph(100, 0.5)
    rep = check_theorem6(g, EXAMPLE_DIST)
    assert rep.ratio <= 4
    assert rep.ratio <= ski_upper_bound(100, 0.5)
    assert check_theorem6(g, Uniform(1, 2)).ratio <= 2


def test_monotone_check_preconditions_and_violation():
    with pytest.raises(PreconditionFailed):
        check_theorem6(homework_graph(3), EXAMPLE_DIST)
    with pytest.raises(PropertyViolation):
        check_theorem6(ski_graph(10, 0.5), EXAMPLE_DIST, MonotoneCondition(100.0, 100.0))


def test_monotone_bound_random_sweep(rng):
    for _ in range(200):
        g = random_monotone_distance(rng, int(rng.integers(1, 13)))
        assert check_theorem6(g, Uniform(1, 2)).ratio <= 2 * (1 + 1e-9)


def test_point_mass_rents_forever():
    g = ski_graph(40, 0.5)
    assert exact_ratio(g, point_mass(3.0)).ratio == pytest.approx(40 * 0.5)
