"""Random task-graph and distribution generators for property tests and sweeps.

Every generator takes an explicit ``numpy.random.Generator``. The
structured generators plant a distance function ``D`` first and then pick
weights that make ``D`` the true distance to the target.
"""

from __future__ import annotations

import numpy as np

from .distributions import Finite
from .graph import TaskGraph, build_graph


def _nid(i: int, k: int) -> str:
    return f"v{i}_{k}"


def _layer_ids(n: int, widths: list[int]) -> list[list[str]]:
    layers = [["s"]]
    layers += [[_nid(i, k) for k in range(widths[i - 2])] for i in range(2, n + 1)]
    layers.append(["t"])
    return layers


def _assemble(n: int, layers: list[list[str]], edges: list[dict]) -> TaskGraph:
    nodes = [{"id": v, "layer": i} for i, layer in enumerate(layers, 1) for v in layer]
    return build_graph({"n": n, "nodes": nodes, "edges": edges, "start": "s", "target": "t"})


def random_layered(
    rng: np.random.Generator,
    n: int,
    max_width: int = 3,
    edge_prob: float = 0.6,
    max_weight: float = 4.0,
    integer_weights: bool = False,
) -> TaskGraph:
    """Arbitrary layered graph; every node gets at least one in- and out-edge."""
    widths = [int(rng.integers(1, max_width + 1)) for _ in range(n - 1)]
    layers = _layer_ids(n, widths)

    def weight() -> float:
        if integer_weights:
            return float(rng.integers(0, int(max_weight) + 1))
        return float(rng.uniform(0.0, max_weight))

    edges = []
    for cur, nxt in zip(layers, layers[1:]):
        linked = np.zeros((len(cur), len(nxt)), dtype=bool)
        for a in range(len(cur)):
            linked[a] = rng.random(len(nxt)) < edge_prob
            if not linked[a].any():
                linked[a, rng.integers(len(nxt))] = True
        for b in range(len(nxt)):
            if not linked[:, b].any():
                linked[rng.integers(len(cur)), b] = True
        for a, b in zip(*np.nonzero(linked)):
            edges.append({"from": cur[a], "to": nxt[b], "w": weight()})
    return _assemble(n, layers, edges)


def _planted(
    rng: np.random.Generator,
    n: int,
    max_width: int,
    edge_prob: float,
    max_slack: float,
    monotone: bool,
) -> TaskGraph:
    widths = [int(rng.integers(1, max_width + 1)) for _ in range(n - 1)]
    layers = _layer_ids(n, widths)
    D: dict[str, float] = {"s": 1.0, "t": 0.0}
    for i, layer in enumerate(layers[1:-1], 1):
        prev = [D[v] for v in layers[i - 1]]
        # Monotone: no node may be farther than the farthest predecessor.
        top = max(prev) if monotone else 1.0
        vals = rng.uniform(0.0, top, len(layer))
        # Guarantee a successor no farther than the closest node of the previous layer.
        vals[int(rng.integers(len(layer)))] = rng.uniform(0.0, min(prev))
        for v, d in zip(layer, vals):
            D[v] = float(d)

    def w(u: str, v: str, tight: bool) -> float:
        base = max(0.0, D[u] - D[v])
        return base if tight else base + float(rng.uniform(0.0, max_slack))

    edges = []
    for cur, nxt in zip(layers, layers[1:]):
        for u in cur:
            ok = [v for v in nxt if D[v] <= D[u]]
            tight = ok[int(rng.integers(len(ok)))]
            edges.append({"from": u, "to": tight, "w": w(u, tight, True)})
            for v in nxt:
                allowed = D[v] <= D[u] or not monotone
                if v != tight and allowed and rng.random() < edge_prob:
                    edges.append({"from": u, "to": v, "w": w(u, v, False)})
        for v in nxt:
            if not any(e["to"] == v for e in edges):
                cands = [u for u in cur if D[v] <= D[u] or not monotone]
                u = cands[int(rng.integers(len(cands)))]
                edges.append({"from": u, "to": v, "w": w(u, v, False)})
    return _assemble(n, layers, edges)


def random_bounded_distance(
    rng: np.random.Generator,
    n: int,
    max_width: int = 3,
    edge_prob: float = 0.5,
    max_slack: float = 0.5,
) -> TaskGraph:
    """Graph with ``d(v, t) <= d(s, t) = 1`` everywhere; distances may rise along edges."""
    return _planted(rng, n, max_width, edge_prob, max_slack, monotone=False)


def random_monotone_distance(
    rng: np.random.Generator,
    n: int,
    max_width: int = 3,
    edge_prob: float = 0.5,
    max_slack: float = 0.5,
) -> TaskGraph:
    """Graph whose distance to the target never increases along an edge."""
    return _planted(rng, n, max_width, edge_prob, max_slack, monotone=True)


def random_finite(
    rng: np.random.Generator,
    max_atoms: int = 3,
    hi: float = 5.0,
    include_one: bool | None = None,
) -> Finite:
    """Finite distribution on ``[1, hi]`` with up to ``max_atoms`` atoms.

    Atoms are rounded to quarters so that ties between perceived costs
    actually occur in tests.
    """
    k = int(rng.integers(1, max_atoms + 1))
    vals = set(np.round(rng.uniform(1.0, hi, k) * 4) / 4)
    if include_one if include_one is not None else rng.random() < 0.5:
        vals.add(1.0)
    vals = sorted(vals)
    probs = rng.dirichlet(np.ones(len(vals)))
    return Finite.of(list(zip(vals, probs)))
