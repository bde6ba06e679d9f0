from __future__ import annotations

import numpy as np
import pytest

from prokrast.agent import exact_ratio, simulate
from prokrast.distributions import point_mass, z_value
from prokrast.errors import ValidationError
from prokrast.graph import distances, is_bounded_distance, is_monotone_distance
from prokrast.scenarios import (
    EXAMPLE_DIST,
    ExampleSpec,
    default_levels,
    gallery,
    homework_expected_cost,
    homework_graph,
    marathon_graph,
    ski_graph,
    ski_upper_bound,
)


def test_homework_matches_closed_form():
    for n in (1, 2, 5, 12):
        assert exact_ratio(homework_graph(n), EXAMPLE_DIST).ratio == pytest.approx(homework_expected_cost(n), rel=1e-12)
        assert homework_expected_cost(n) == pytest.approx(2 * (4 / 3) ** (n - 1) - 1)


def test_homework_step_ratio_tends_to_four_thirds():
    r = [exact_ratio(homework_graph(n), EXAMPLE_DIST).ratio for n in (29, 30)]
    assert r[1] / r[0] == pytest.approx(4 / 3, abs=1e-3)


def test_marathon_structure():
    g = marathon_graph(20, 4)
    assert is_bounded_distance(g)
    assert not is_monotone_distance(g)
    d = distances(g)
    assert d[g.start] == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        marathon_graph(10, 4, epsilon=1.0)


def test_marathon_unbiased_agent_trains_straight():
    g = marathon_graph(16, 4)
    sim = simulate(g, point_mass(1.0), seed=0, trials=5)
    assert np.allclose(sim.totals, distances(g)[g.start])


def test_marathon_cost_scales_like_n_over_m():
    for n in (64, 128, 256):
        m = default_levels(n)
        rep = simulate(marathon_graph(n, m), EXAMPLE_DIST, seed=n, trials=2000).report
        assert 0.2 <= rep.expected_cost / (n / m) <= 5


def test_ski_structure_and_regimes():
    for n in (1, 3, 10):
        assert is_monotone_distance(ski_graph(n, 0.5))
    assert distances(ski_graph(1, 0.5))["s"] == 0.5
    g = ski_graph(100, 0.5)
    assert exact_ratio(g, EXAMPLE_DIST).ratio <= ski_upper_bound(100, 0.5)
    assert exact_ratio(ski_graph(30, 0.5), point_mass(3.0)).ratio == pytest.approx(15.0)


def test_ski_agent_buys_on_first_low_day_away_from_the_end():
    n = 30
    sim = simulate(ski_graph(n, 0.5), EXAMPLE_DIST, seed=8, trials=500)
    for traj in sim.trajectories():
        for i, (v, b) in enumerate(zip(traj.path[:-1], traj.biases), 1):
            if v.startswith(("s", "rent")) and i <= n - 2:
                bought = traj.path[i].startswith("own")
                assert bought == (b == 1.0)


def test_example_spec_builds_every_scenario():
    for sc, params in (("homework", {}), ("marathon", {"m": 3}), ("ski", {"delta": 0.25})):
        assert ExampleSpec(sc, 6, params).build().n == 6


def test_gallery_z_values():
    zs = {k: z_value(d).z for k, d in gallery().items()}
    assert zs["uniform_1_3"] == pytest.approx(1.125)
    assert zs["uniform_1_2"] == pytest.approx(1.0)
    assert zs["half_normal"] == pytest.approx(0.507, abs=0.005)
    assert zs["heavy_tail_sqrt"] == pytest.approx(5.0)
