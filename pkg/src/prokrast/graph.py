"""Layered task graphs: construction, distances to the target, structural tests."""

from __future__ import annotations

import json
import math
from collections import defaultdict
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from pathlib import Path
from typing import Any

from .errors import (
    CycleDetected,
    Disconnected,
    GraphError,
    LayeringError,
    NegativeWeight,
    TargetUnreachable,
)

#: Absolute tie tolerance used in every comparison of costs or distances.
TAU = 1e-12


@dataclass(frozen=True, order=True)
class Edge:
    src: str
    dst: str
    w: float


class TaskGraph:
    """Immutable layered DAG with a single start in layer 1 and a single target in layer n+1.

    Build instances with :func:`build_graph` (or :meth:`from_dict`); the
    constructor assumes its arguments are already validated and pruned.
    """

    __slots__ = ("n", "start", "target", "_layer", "_nodes", "_edges", "_out", "_dist")

    def __init__(
        self,
        n: int,
        layer: Mapping[str, int],
        edges: Iterable[Edge],
        start: str,
        target: str,
    ) -> None:
        self.n = n
        self.start = start
        self.target = target
        self._layer = dict(layer)
        self._nodes = tuple(sorted(self._layer, key=lambda v: (self._layer[v], v)))
        order = {v: k for k, v in enumerate(self._nodes)}
        self._edges = tuple(sorted(edges, key=lambda e: (order[e.src], order[e.dst], e.w)))
        out: dict[str, list[int]] = {v: [] for v in self._nodes}
        for k, e in enumerate(self._edges):
            out[e.src].append(k)
        self._out = {v: tuple(ks) for v, ks in out.items()}
        self._dist: DistanceTable | None = None

    @property
    def nodes(self) -> tuple[str, ...]:
        """Nodes sorted by layer, then id."""
        return self._nodes

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    def layer(self, v: str) -> int:
        return self._layer[v]

    def layer_nodes(self, i: int) -> tuple[str, ...]:
        return tuple(v for v in self._nodes if self._layer[v] == i)

    def out_edges(self, v: str) -> tuple[int, ...]:
        """Indices into :attr:`edges` of the edges leaving ``v``, in canonical order."""
        return self._out[v]

    def __len__(self) -> int:
        return len(self._nodes)

    def __repr__(self) -> str:
        return f"TaskGraph(n={self.n}, nodes={len(self._nodes)}, edges={len(self._edges)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TaskGraph):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self) -> int:
        return hash((self.n, self.start, self.target, self._edges))

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "nodes": [{"id": v, "layer": self._layer[v]} for v in self._nodes],
            "edges": [{"from": e.src, "to": e.dst, "w": e.w} for e in self._edges],
            "start": self.start,
            "target": self.target,
        }

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> TaskGraph:
        return build_graph(raw)


@dataclass(frozen=True)
class DistanceTable(Mapping[str, float]):
    """Shortest-path cost from every node to the target."""

    d: Mapping[str, float]

    def __getitem__(self, v: str) -> float:
        return self.d[v]

    def __iter__(self):
        return iter(self.d)

    def __len__(self) -> int:
        return len(self.d)


def build_graph(raw: Mapping[str, Any]) -> TaskGraph:
    """Validate a node/edge description and return a pruned :class:`TaskGraph`.

    ``raw`` follows the JSON file layout: ``n``, ``nodes`` (``id``/``layer``),
    ``edges`` (``from``/``to``/``w``), ``start`` and ``target``. Nodes that do
    not lie on any start-to-target path are dropped; exact duplicate edges
    collapse to one.
    """
    try:
        n = int(raw["n"])
        layer = {}
        for node in raw["nodes"]:
            vid = str(node["id"])
            if vid in layer:
                raise GraphError(f"duplicate node id {vid!r}")
            layer[vid] = int(node["layer"])
        edges = [Edge(str(e["from"]), str(e["to"]), float(e["w"])) for e in raw["edges"]]
        start = str(raw["start"])
        target = str(raw["target"])
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph description: {exc!r}") from exc

    if n < 1:
        raise GraphError(f"n must be positive, got {n}")
    for v, i in layer.items():
        if not 1 <= i <= n + 1:
            raise LayeringError(f"node {v!r} has layer {i} outside 1..{n + 1}")
    if start not in layer or target not in layer:
        raise GraphError("start and target must be listed among the nodes")
    if layer[start] != 1:
        raise LayeringError(f"start {start!r} must be in layer 1")
    if layer[target] != n + 1:
        raise LayeringError(f"target {target!r} must be in layer {n + 1}")
    for e in edges:
        if e.src not in layer or e.dst not in layer:
            raise GraphError(f"edge {e.src!r}->{e.dst!r} references an unknown node")
        if layer[e.dst] != layer[e.src] + 1:
            raise LayeringError(
                f"edge {e.src!r}->{e.dst!r} goes from layer {layer[e.src]} to {layer[e.dst]}"
            )
        if not math.isfinite(e.w) or e.w < 0:
            raise NegativeWeight(f"edge {e.src!r}->{e.dst!r} has weight {e.w!r}")

    edges = sorted(set(edges))
    succ: dict[str, list[str]] = defaultdict(list)
    pred: dict[str, list[str]] = defaultdict(list)
    for e in edges:
        succ[e.src].append(e.dst)
        pred[e.dst].append(e.src)
    live = _reach(start, succ) & _reach(target, pred)
    if target not in live:
        raise Disconnected(f"no path from {start!r} to {target!r}")

    kept_layer = {v: i for v, i in layer.items() if v in live}
    kept_edges = [e for e in edges if e.src in live and e.dst in live]
    return TaskGraph(n, kept_layer, kept_edges, start, target)


def _reach(root: str, adj: Mapping[str, list[str]]) -> set[str]:
    seen = {root}
    stack = [root]
    while stack:
        for u in adj.get(stack.pop(), ()):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def distances(g: TaskGraph) -> DistanceTable:
    """Backward DP over layers; linear in the number of edges. Cached on the graph."""
    if g._dist is None:
        d: dict[str, float] = {g.target: 0.0}
        for v in reversed(g.nodes):
            if v == g.target:
                continue
            d[v] = min(g.edges[k].w + d[g.edges[k].dst] for k in g.out_edges(v))
        g._dist = DistanceTable(d)
    return g._dist


def _slack(x: float) -> float:
    return TAU * max(1.0, abs(x))


def is_bounded_distance(g: TaskGraph) -> bool:
    """Every node is at most as far from the target as the start is."""
    d = distances(g)
    ds = d[g.start]
    return all(d[v] <= ds + _slack(ds) for v in g.nodes)


def is_monotone_distance(g: TaskGraph) -> bool:
    """Distance to the target never increases along an edge."""
    d = distances(g)
    return all(d[e.src] + _slack(d[e.src]) >= d[e.dst] for e in g.edges)


def layerize(
    edges: Iterable[tuple[str, str, float]],
    source: str,
    target: str,
) -> TaskGraph:
    """Turn a generic weighted DAG into a layered task graph.

    Layer ``i`` holds a copy ``"v@i"`` of every node reachable from ``source``
    in exactly ``i - 1`` edges; the target gets a zero-weight self-chain so
    that shorter paths are padded to the common horizon. Only nodes on some
    source-to-target path are copied.
    """
    edges = [(str(u), str(v), float(w)) for u, v, w in edges]
    deps: dict[str, set[str]] = defaultdict(set)
    succ: dict[str, list[tuple[str, float]]] = defaultdict(list)
    pred: dict[str, list[str]] = defaultdict(list)
    for u, v, w in edges:
        deps[v].add(u)
        deps.setdefault(u, set())
        succ[u].append((v, w))
        pred[v].append(u)
    deps.setdefault(source, set())
    deps.setdefault(target, set())
    try:
        tuple(TopologicalSorter(deps).static_order())
    except CycleError as exc:
        raise CycleDetected(f"input graph has a cycle: {exc.args[1]}") from exc

    fwd = _reach(source, {u: [v for v, _ in vs] for u, vs in succ.items()})
    if target not in fwd:
        raise TargetUnreachable(f"{target!r} is not reachable from {source!r}")
    live = fwd & _reach(target, pred)
    if source == target:
        raise GraphError("source and target coincide")

    layers: list[list[str]] = [[source]]
    while layers[-1] != [target]:
        nxt = {target} if target in layers[-1] else set()
        for u in layers[-1]:
            if u == target:
                continue
            nxt.update(v for v, _ in succ[u] if v in live)
        layers.append(sorted(nxt))

    n = len(layers) - 1
    nodes = [{"id": f"{v}@{i}", "layer": i} for i, layer in enumerate(layers, 1) for v in layer]
    out = []
    for i, layer in enumerate(layers[:-1], 1):
        for u in layer:
            if u == target:
                out.append({"from": f"{u}@{i}", "to": f"{u}@{i + 1}", "w": 0.0})
                continue
            for v, w in succ[u]:
                if v in live:
                    out.append({"from": f"{u}@{i}", "to": f"{v}@{i + 1}", "w": w})
    return build_graph(
        {"n": n, "nodes": nodes, "edges": out, "start": f"{source}@1", "target": f"{target}@{n + 1}"}
    )


def load_graph(path: str | Path) -> TaskGraph:
    with open(path, encoding="utf-8") as fh:
        return build_graph(json.load(fh))


def save_graph(g: TaskGraph, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(g.to_dict(), fh, indent=1)
        fh.write("\n")
