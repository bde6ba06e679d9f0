from __future__ import annotations

import itertools
import json
import math

import numpy as np
import pytest

from prokrast.errors import CycleDetected, Disconnected, LayeringError, NegativeWeight, TargetUnreachable
from prokrast.graph import (
    build_graph,
    distances,
    is_bounded_distance,
    is_monotone_distance,
    layerize,
    load_graph,
    save_graph,
)
from prokrast.random_graphs import random_bounded_distance, random_layered, random_monotone_distance
from prokrast.scenarios import homework_graph, marathon_graph, ski_graph


def single_edge(w: float = 1.0):
    return build_graph({
        "n": 1,
        "nodes": [{"id": "s", "layer": 1}, {"id": "t", "layer": 2}],
        "edges": [{"from": "s", "to": "t", "w": w}],
        "start": "s",
        "target": "t",
    })


def all_path_costs(g) -> list[float]:
    """Every start-to-target path cost, by exhaustive DFS."""
    out = []

    def walk(v, acc):
        if v == g.target:
            out.append(acc)
            return
        for k in g.out_edges(v):
            e = g.edges[k]
            walk(e.dst, acc + e.w)

    walk(g.start, 0.0)
    return out


def test_single_edge_graph():
    g = single_edge()
    assert g.n == 1
    assert len(g.edges) == 1
    assert distances(g)["s"] == 1.0
    assert is_bounded_distance(g) and is_monotone_distance(g)


def test_homework_graph_shape_and_distances():
    g = homework_graph(3)
    assert len(g) == 6
    assert {(e.src, e.dst, e.w) for e in g.edges} == {
        ("s1", "t2", 1.0), ("s2", "t3", 2.0), ("s3", "t4", 4.0),
        ("s1", "s2", 0.0), ("s2", "s3", 0.0), ("t2", "t3", 0.0), ("t3", "t4", 0.0),
    }
    d = distances(homework_graph(6))
    for i in range(1, 7):
        assert d[f"s{i}"] == 2.0 ** (i - 1)
    assert all(d[f"t{i}"] == 0 for i in range(2, 8))


def test_dead_end_is_pruned_and_disconnection_detected():
    raw = {
        "n": 2,
        "nodes": [{"id": "s", "layer": 1}, {"id": "a", "layer": 2}, {"id": "b", "layer": 2}, {"id": "t", "layer": 3}],
        "edges": [{"from": "s", "to": "a", "w": 1}, {"from": "s", "to": "b", "w": 0}, {"from": "a", "to": "t", "w": 1}],
        "start": "s",
        "target": "t",
    }
    g = build_graph(raw)
    assert g.nodes == ("s", "a", "t")
    raw["edges"] = [{"from": "s", "to": "b", "w": 0}, {"from": "a", "to": "t", "w": 1}]
    with pytest.raises(Disconnected):
        build_graph(raw)


def test_validation_errors():
    base = {
        "n": 2,
        "nodes": [{"id": "s", "layer": 1}, {"id": "a", "layer": 2}, {"id": "t", "layer": 3}],
        "start": "s",
        "target": "t",
    }
    with pytest.raises(LayeringError):
        build_graph({**base, "edges": [{"from": "s", "to": "t", "w": 1}]})
    with pytest.raises(NegativeWeight):
        build_graph({**base, "edges": [{"from": "s", "to": "a", "w": -1}, {"from": "a", "to": "t", "w": 1}]})
    with pytest.raises(NegativeWeight):
        build_graph({**base, "edges": [{"from": "s", "to": "a", "w": math.inf}, {"from": "a", "to": "t", "w": 1}]})


def test_parallel_edges_kept_exact_duplicates_merged():
    raw = {
        "n": 1,
        "nodes": [{"id": "s", "layer": 1}, {"id": "t", "layer": 2}],
        "edges": [{"from": "s", "to": "t", "w": 1}, {"from": "s", "to": "t", "w": 1}, {"from": "s", "to": "t", "w": 2}],
        "start": "s",
        "target": "t",
    }
    assert [e.w for e in build_graph(raw).edges] == [1.0, 2.0]


def test_structural_properties_of_scenarios():
    assert is_bounded_distance(marathon_graph(20, 5))
    assert not is_bounded_distance(homework_graph(4))
    assert not is_monotone_distance(homework_graph(4))
    assert is_monotone_distance(ski_graph(10, 0.5))
    assert distances(ski_graph(4, 0.5))["s"] == 1.0


def test_distance_dp_matches_path_enumeration(rng):
    for k in range(200):
        g = random_layered(rng, int(rng.integers(1, 6)), max_width=4, integer_weights=bool(k % 2))
        costs = all_path_costs(g)
        assert distances(g)[g.start] == pytest.approx(min(costs), abs=1e-12)


def test_monotone_implies_bounded(rng):
    for _ in range(200):
        for g in (random_layered(rng, int(rng.integers(1, 8))), random_monotone_distance(rng, int(rng.integers(1, 8)))):
            if is_monotone_distance(g):
                assert is_bounded_distance(g)


def test_generators_plant_their_property(rng):
    for _ in range(100):
        g = random_monotone_distance(rng, int(rng.integers(1, 13)))
        assert is_monotone_distance(g)
        assert distances(g)[g.start] == pytest.approx(1.0)
        assert is_bounded_distance(random_bounded_distance(rng, int(rng.integers(1, 30))))


def test_layerize_fixed_point_on_layered_input():
    g = homework_graph(3)
    out = layerize([(e.src, e.dst, e.w) for e in g.edges], "s1", "t4")
    assert out.n == 3
    assert len(out) == len(g)
    assert sorted(all_path_costs(out)) == sorted(all_path_costs(g))


def test_layerize_diamond_and_padding():
    diamond = layerize([("s", "a", 1), ("s", "b", 2), ("a", "t", 1), ("b", "t", 0)], "s", "t")
    assert diamond.n == 2 and len(diamond) == 4
    skewed = layerize([("s", "t", 5), ("s", "a", 1), ("a", "t", 1)], "s", "t")
    assert skewed.n == 2
    assert ("t@2", "t@3", 0.0) in {(e.src, e.dst, e.w) for e in skewed.edges}
    assert sorted(all_path_costs(skewed)) == [2.0, 5.0]


def test_layerize_preserves_path_cost_multiset(rng):
    for _ in range(50):
        names = ["s", "a", "b", "c", "d", "t"]
        edges = []
        for i, j in itertools.combinations(range(6), 2):
            if rng.random() < 0.5 or (i, j) == (0, 5):
                edges.append((names[i], names[j], float(rng.integers(0, 5))))

        def paths(v, acc):
            if v == "t":
                yield acc
            for u, x, w in edges:
                if u == v:
                    yield from paths(x, acc + w)

        assert sorted(all_path_costs(layerize(edges, "s", "t"))) == sorted(paths("s", 0.0))


def test_layerize_errors():
    with pytest.raises(CycleDetected):
        layerize([("s", "a", 1), ("a", "b", 1), ("b", "a", 1), ("a", "t", 1)], "s", "t")
    with pytest.raises(TargetUnreachable):
        layerize([("s", "a", 1), ("t", "a", 1)], "s", "t")


def test_file_round_trip_is_bit_exact(tmp_path):
    g = ski_graph(5, 0.1 + 0.2)
    path = tmp_path / "g.json"
    save_graph(g, path)
    back = load_graph(path)
    assert back == g
    assert [e.w for e in back.edges] == [e.w for e in g.edges]
    assert json.loads(path.read_text())["start"] == "s"


def test_canonical_order_is_independent_of_input_order(rng):
    g = random_layered(rng, 4)
    raw = g.to_dict()
    perm = rng.permutation(len(raw["edges"]))
    shuffled = {**raw, "edges": [raw["edges"][k] for k in perm], "nodes": raw["nodes"][::-1]}
    assert build_graph(shuffled).to_dict() == raw
    assert np.all(np.diff([g.layer(v) for v in g.nodes]) >= 0)
