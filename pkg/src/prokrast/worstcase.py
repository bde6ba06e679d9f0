"""Worst-case task graphs for a bias distribution.

The worst graph has two chains: procrastination nodes ``s_1..s_n`` joined by
free edges, and done nodes ``t_2..t_{n+1}`` joined by free edges, with a
"do it now" edge ``s_i -> t_{i+1}`` of cost ``d(s_i, t)``. Distances grow by
a posted price per layer, ``d(s_{i+1}) = p_i d(s_i)``, and the prices come
from the designer recursion

    r_n = 1,   r_i = max_p (1 - S(p)) + p S(p) r_{i+1},

where ``S(p) = Pr[B >= p]`` and ``r_1`` is the worst procrastination ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .agent import exact_ratio
from .distributions import BiasDistribution, dominates, z_value
from .errors import InvalidThreshold, NotDominant, UnboundedRatio, ValidationError
from .graph import TaskGraph, build_graph
from .pricing import LinearObjective, optimal_posted_price


@dataclass(frozen=True)
class WorstCaseSpec:
    """``prices[i-1] = p_i`` (``n-1`` entries), ``ratios[i-1] = r_i`` and
    ``distances[i-1] = d(s_i, t)`` (``n`` entries each)."""

    n: int
    prices: tuple[float, ...]
    ratios: tuple[float, ...]
    distances: tuple[float, ...]

    @property
    def ratio(self) -> float:
        return self.ratios[0]

    def rows(self) -> list[dict[str, object]]:
        """One row per layer: ``layer, price, distance, ratio`` (no price on the last layer)."""
        out = []
        for i in range(self.n):
            price = self.prices[i] if i < self.n - 1 else None
            out.append({"layer": i + 1, "price": price, "distance": self.distances[i], "ratio": self.ratios[i]})
        return out


def two_chain_graph(dists: list[float] | tuple[float, ...]) -> TaskGraph:
    """Graph with ``d(s_i, t) = dists[i-1]`` built from nondecreasing distances."""
    n = len(dists)
    if n < 1:
        raise ValidationError("need at least one layer")
    if any(b < a for a, b in zip(dists, dists[1:])):
        raise ValidationError("distances along the s-chain must be nondecreasing")
    nodes = [{"id": f"s{i}", "layer": i} for i in range(1, n + 1)]
    nodes += [{"id": f"t{i}", "layer": i} for i in range(2, n + 2)]
    edges = []
    for i in range(1, n + 1):
        edges.append({"from": f"s{i}", "to": f"t{i + 1}", "w": dists[i - 1]})
        if i < n:
            edges.append({"from": f"s{i}", "to": f"s{i + 1}", "w": 0.0})
        if i >= 2:
            edges.append({"from": f"t{i}", "to": f"t{i + 1}", "w": 0.0})
    return build_graph({"n": n, "nodes": nodes, "edges": edges, "start": "s1", "target": f"t{n + 1}"})


def synthesize(dist: BiasDistribution, n: int) -> tuple[WorstCaseSpec, TaskGraph]:
    """Run the designer recursion and materialize the worst-case graph."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    if math.isinf(z_value(dist).z):
        raise UnboundedRatio("z(F) is infinite; the worst-case ratio is unbounded")
    ratios = [1.0]
    prices: list[float] = []
    for _ in range(n - 1):
        # r_i - 1 = max_p [-Pr[B>=p] + r_{i+1} p Pr[B>=p]]: a posted price with alpha=-1, beta=r_{i+1}.
        res = optimal_posted_price(dist, LinearObjective(-1.0, ratios[-1]))
        prices.append(res.price)
        ratios.append(1.0 + res.value)
    prices.reverse()
    ratios.reverse()
    dists = [1.0]
    for p in prices:
        dists.append(dists[-1] * p)
    spec = WorstCaseSpec(n, tuple(prices), tuple(ratios), tuple(dists))
    return spec, two_chain_graph(dists)


def theorem3_bound(z: float, n: int) -> float:
    """``sum_{i=0}^{n-1} z^i``, the worst-case ratio bound over all graphs with ``n`` days."""
    if z < 0:
        raise ValidationError("z must be nonnegative")
    if z == 1:
        return float(n)
    return math.fsum(z**i for i in range(n))


@dataclass(frozen=True)
class Theorem4Report:
    """Constant-growth graph ``d(s_i) = b0^(i-1)`` and three views of its ratio.

    ``paper_value`` uses the per-step factor ``1 - 1/b0``; ``closed_form``
    uses ``1 - Pr[B >= b0]``, which is what the construction actually yields
    and matches ``derived_value`` (exact DP).
    """

    graph: TaskGraph
    b0: float
    z0: float
    paper_value: float
    closed_form: float
    derived_value: float

    @property
    def gap(self) -> float:
        return self.paper_value - self.derived_value

    @property
    def flagged(self) -> bool:
        return abs(self.gap) > 1e-9 * max(1.0, abs(self.derived_value))


def theorem4_graph(dist: BiasDistribution, b0: float, n: int) -> Theorem4Report:
    if not b0 > 1:
        raise InvalidThreshold(f"b0 must exceed 1, got {b0}")
    s = float(dist.survival(b0))
    if s <= 0:
        raise InvalidThreshold(f"Pr[B >= {b0}] = 0")
    z0 = b0 * s
    g = two_chain_graph([b0**i for i in range(n)])
    stated = math.fsum((1 - 1 / b0) * z0 ** (i - 1) for i in range(1, n)) + z0 ** (n - 1)
    closed = math.fsum((1 - s) * z0 ** (i - 1) for i in range(1, n)) + z0 ** (n - 1)
    derived = exact_ratio(g, dist).ratio
    return Theorem4Report(g, b0, z0, stated, closed, derived)


@dataclass(frozen=True)
class DominanceReport:
    n: int
    cost_low: float
    cost_high: float

    @property
    def holds(self) -> bool:
        return self.cost_high >= self.cost_low - 1e-9 * max(1.0, self.cost_low)


def verify_dominance_monotonicity(f_low: BiasDistribution, f_high: BiasDistribution, n: int) -> DominanceReport:
    """Evaluate ``f_low``'s worst graph under both distributions.

    The dominating distribution must make the agent at least as costly.
    """
    if not dominates(f_high, f_low):
        raise NotDominant("f_high does not stochastically dominate f_low")
    _, g = synthesize(f_low, n)
    return DominanceReport(n, exact_ratio(g, f_low).ratio, exact_ratio(g, f_high).ratio)
