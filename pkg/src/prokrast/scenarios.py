"""The three worked scenarios (homework, marathon, ski rental) and the distribution gallery."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

from .distributions import BiasDistribution, Finite, HalfNormal, HeavyTailSqrt, Uniform
from .errors import ValidationError
from .graph import TaskGraph, build_graph
from .worstcase import two_chain_graph

Scenario = Literal["homework", "marathon", "ski"]

#: The two-point bias used in every worked example: b = 1 w.p. 1/3, b = 3 w.p. 2/3.
EXAMPLE_DIST = Finite.of({1.0: 1 / 3, 3.0: 2 / 3})


@dataclass(frozen=True)
class ExampleSpec:
    scenario: Scenario
    n: int
    params: dict[str, float] = field(default_factory=dict)

    def build(self) -> TaskGraph:
        if self.scenario == "homework":
            return homework_graph(self.n)
        if self.scenario == "marathon":
            m = int(self.params.get("m", default_levels(self.n)))
            return marathon_graph(self.n, m, self.params.get("epsilon"))
        if self.scenario == "ski":
            return ski_graph(self.n, self.params.get("delta", 0.5))
        raise ValidationError(f"unknown scenario {self.scenario!r}")


def homework_graph(n: int) -> TaskGraph:
    """Do the assignment on day ``i`` at cost ``2^(i-1)``, or put it off to day ``i+1``."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    return two_chain_graph([2.0 ** (i - 1) for i in range(1, n + 1)])


def homework_expected_cost(n: int, pay_prob: float = 1 / 3) -> float:
    """Closed-form expected cost when the agent pays at ``s_i`` with probability ``q``.

    The task is done on day ``i < n`` with probability ``(1-q)^(i-1) q`` at
    cost ``2^(i-1)``, and on day ``n`` otherwise. The agent pays iff ``b < 2``,
    so ``q = Pr[B < 2]``.
    """
    q = pay_prob
    early = math.fsum((1 - q) ** (i - 1) * q * 2.0 ** (i - 1) for i in range(1, n))
    return early + (1 - q) ** (n - 1) * 2.0 ** (n - 1)


def default_levels(n: int) -> int:
    return max(2, math.ceil(math.log2(max(n, 2))))


def marathon_graph(n: int, m: int, epsilon: float | None = None) -> TaskGraph:
    """Fitness levels ``0..m``; train (+1, cost ``1/m``), sleep (-1, free), race at the end.

    Level ``m`` is maintained for free and level 0 for ``epsilon`` (default
    ``1/(3m)``; with ``epsilon = 0`` an unbiased agent at level 0 is exactly
    indifferent and, procrastinating on ties, never trains). The final edge
    from level ``j`` to the race costs ``1 - j/m``. The agent starts at level 0
    on day 1.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    if m < 2:
        raise ValidationError("need m >= 2 fitness levels")
    if epsilon is None:
        epsilon = 1 / (3 * m)
    if not 0 <= epsilon < 2 / (3 * m):
        raise ValidationError(f"epsilon must lie in [0, 2/(3m)) = [0, {2 / (3 * m)})")

    def node(i: int, j: int) -> str:
        return f"L{i}_{j}"

    nodes = [{"id": "t", "layer": n + 1}]
    edges = []
    for i in range(1, n + 1):
        for j in range(m + 1):
            nodes.append({"id": node(i, j), "layer": i})
            if i == n:
                edges.append({"from": node(i, j), "to": "t", "w": 1 - j / m})
                continue
            if j < m:
                edges.append({"from": node(i, j), "to": node(i + 1, j + 1), "w": 1 / m})
            if j > 0:
                edges.append({"from": node(i, j), "to": node(i + 1, j - 1), "w": 0.0})
            if j == m:
                edges.append({"from": node(i, j), "to": node(i + 1, j), "w": 0.0})
            if j == 0:
                edges.append({"from": node(i, j), "to": node(i + 1, j), "w": epsilon})
    return build_graph({"n": n, "nodes": nodes, "edges": edges, "start": node(1, 0), "target": "t"})


def ski_graph(n: int, delta: float) -> TaskGraph:
    """Rent for ``delta`` per day or buy once for 1; owning is free afterwards."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    if not delta > 0:
        raise ValidationError("delta must be positive")

    def rent(i: int) -> str:
        return "s" if i == 1 else f"rent{i}"

    nodes = [{"id": "t", "layer": n + 1}]
    edges = []
    for i in range(1, n + 1):
        nodes.append({"id": rent(i), "layer": i})
        if i >= 2:
            nodes.append({"id": f"own{i}", "layer": i})
        nxt_rent = rent(i + 1) if i < n else "t"
        nxt_own = f"own{i + 1}" if i < n else None
        edges.append({"from": rent(i), "to": nxt_rent, "w": delta})
        if nxt_own is not None:
            edges.append({"from": rent(i), "to": nxt_own, "w": 1.0})
        if i >= 2:
            edges.append({"from": f"own{i}", "to": nxt_own or "t", "w": 0.0})
    return build_graph({"n": n, "nodes": nodes, "edges": edges, "start": "s", "target": "t"})


def ski_upper_bound(n: int, delta: float, wait_prob: float = 2 / 3) -> float:
    """``sum_{i=1}^n q^i (delta*i + 1)``: cost bound when the skier buys on the first low-bias day."""
    return math.fsum(wait_prob**i * (delta * i + 1) for i in range(1, n + 1))


def gallery() -> dict[str, BiasDistribution]:
    """Named distributions with z values 1.125, 1, about 0.507 and 5."""
    return {
        "uniform_1_3": Uniform(1.0, 3.0),
        "uniform_1_2": Uniform(1.0, 2.0),
        "half_normal": HalfNormal(1.0, 1.0),
        "heavy_tail_sqrt": HeavyTailSqrt(100.0),
    }
