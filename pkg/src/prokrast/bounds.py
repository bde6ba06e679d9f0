"""Bounded- and monotone-distance regimes.

* Bounded distance: every realized cost is at most ``n * d(s, t)``, since no
  single step can cost more than the current node's distance, which is at
  most ``d(s, t)``.
* The linear lower bound: a random walk over "fitness" indices whose drift
  is negative, so the agent keeps paying to climb back.
* Monotone distance: a constant bound ``max(1 + 1/beta, 1/(beta*delta))``
  whenever ``Pr[B < x] >= beta (x - 1)`` on ``[1, 1 + delta]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import linregress

from .agent import exact_ratio, simulate
from .distributions import BiasDistribution, z_value
from .errors import (
    ConditionUnsatisfiable,
    NoValidDelta,
    NoValidFraction,
    PreconditionFailed,
    PropertyViolation,
    ValidationError,
)
from .graph import TAU, TaskGraph, build_graph, distances, is_bounded_distance, is_monotone_distance


def _tol(x: float) -> float:
    return TAU * max(1.0, abs(x))


@dataclass(frozen=True)
class Claim1Report:
    n: int
    trials: int
    d_start: float
    max_total: float
    mean_ratio: float

    @property
    def max_ratio(self) -> float:
        return self.max_total / self.d_start

    @property
    def passed(self) -> bool:
        return self.max_total <= self.n * self.d_start + _tol(self.n * self.d_start)


def check_claim1(
    g: TaskGraph,
    dist: BiasDistribution,
    trials: int = 10_000,
    seed: int = 0,
    workers: int | None = None,
) -> Claim1Report:
    """Simulate and check ``total <= n * d(s,t)`` and ``step <= d(current, t)`` on every trajectory."""
    if not is_bounded_distance(g):
        raise PreconditionFailed("graph does not have the bounded distance property")
    dt = distances(g)
    sim = simulate(g, dist, seed=seed, trials=trials, workers=workers)
    node_d = np.array([dt[v] for v in sim.nodes])
    here = node_d[sim.paths[:, :-1]]
    step_bad = sim.step_costs > here + TAU * np.maximum(1.0, here)
    totals = sim.totals
    limit = g.n * dt[g.start]
    total_bad = totals > limit + _tol(limit)
    bad = np.nonzero(step_bad.any(axis=1) | total_bad)[0]
    if len(bad):
        k = int(bad[0])
        traj = next(t for i, t in enumerate(sim.trajectories()) if i == k)
        raise PropertyViolation(
            f"trajectory {k} costs {totals[k]!r} (limit {limit!r}) or overpays a step", traj
        )
    return Claim1Report(g.n, trials, dt[g.start], float(totals.max()), sim.report.ratio)


@dataclass(frozen=True)
class Theorem5Params:
    b_star: float
    alpha: int
    beta: int
    delta: float
    z: float
    survival: float
    gamma: float

    def H(self, delta: float | None = None) -> float:
        d = self.delta if delta is None else delta
        return self.b_star * d**self.alpha - d ** (self.alpha + self.beta) * (self.b_star - 1)

    def check(self) -> None:
        """Raise :class:`PropertyViolation` unless all three parameter invariants hold."""
        frac = self.beta / (self.alpha + self.beta)
        if not 1 / self.b_star < frac < self.survival:
            raise PropertyViolation(f"beta/(alpha+beta) = {frac} not in (1/b*, S(b*))", self)
        if not self.H() > 1:
            raise PropertyViolation(f"H(delta) = {self.H()} <= 1", self)
        if not self.gamma < 0:
            raise PropertyViolation(f"drift {self.gamma} is not negative", self)


#: Candidate deltas 1 - 10^-k, scanned from the smallest k (largest gap from 1) up.
DELTA_SCAN = tuple(1 - 10.0**-k for k in range(1, 16))
H_MARGIN = 1e-6


def theorem5_params(dist: BiasDistribution, max_total: int = 1_000_000) -> Theorem5Params:
    zv = z_value(dist)
    if not zv.z > 1:
        raise NoValidFraction(f"z(F) = {zv.z} <= 1; no fraction fits in (1/b*, S(b*))")
    b = zv.argmax
    s = float(dist.survival(b))
    lo, hi = 1 / b, s
    for total in range(2, max_total + 1):
        # Smallest beta first: beta/total is increasing in beta.
        beta = math.floor(lo * total) + 1
        if beta / total <= lo:
            beta += 1
        if beta < total and beta / total < hi:
            alpha = total - beta
            break
    else:
        raise NoValidFraction(f"no fraction with denominator <= {max_total} in ({lo}, {hi})")
    for delta in DELTA_SCAN:
        h = b * delta**alpha - delta ** (alpha + beta) * (b - 1)
        if h > 1 + H_MARGIN:
            break
    else:
        raise NoValidDelta(f"no delta in the scan gives H(delta) > 1 (b*={b}, alpha={alpha}, beta={beta})")
    gamma = beta * (1 - s) - alpha * s
    params = Theorem5Params(b, alpha, beta, delta, zv.z, s, gamma)
    params.check()
    return params


def t5_node(i: int, j: int) -> str:
    return f"v{i}_{j}"


def theorem5_graph(params: Theorem5Params, n: int, max_nodes: int = 2_000_000) -> TaskGraph:
    """Random-walk graph: node ``v_{i,j}`` sits at distance ``delta^j`` from the target.

    From a middle index ``alpha <= j <= (n-1) beta`` the agent either slides
    down to ``j - alpha`` for free or climbs to ``j + beta`` at cost
    ``delta^j - delta^(j+beta)``. Low indices are forced up to ``alpha``;
    high indices stay put for free. Only nodes reachable from ``v_{1,0}`` are
    generated.
    """
    if n < 2:
        raise ValidationError("n must be >= 2")
    a, b, dl = params.alpha, params.beta, params.delta
    top = (n - 1) * b
    nodes = [{"id": "t", "layer": n + 1}]
    edges = []
    frontier = {0}
    for i in range(1, n + 1):
        if len(nodes) + len(frontier) > max_nodes:
            raise ValidationError(f"graph would exceed {max_nodes} nodes")
        nxt: set[int] = set()
        for j in sorted(frontier):
            nodes.append({"id": t5_node(i, j), "layer": i})
            if i == n:
                edges.append({"from": t5_node(i, j), "to": "t", "w": dl**j})
                continue
            if j < a:
                moves = [(a, dl**j - dl**a)]
            elif j > top:
                moves = [(j, 0.0)]
            else:
                moves = [(j - a, 0.0), (j + b, dl**j - dl ** (j + b))]
            for k, w in moves:
                edges.append({"from": t5_node(i, j), "to": t5_node(i + 1, k), "w": w})
                nxt.add(k)
        frontier = nxt
    return build_graph({"n": n, "nodes": nodes, "edges": edges, "start": t5_node(1, 0), "target": "t"})


@dataclass(frozen=True)
class GrowthFit:
    ns: tuple[int, ...]
    means: tuple[float, ...]
    std_errors: tuple[float, ...]
    slope: float
    intercept: float
    r_squared: float

    def rows(self) -> list[dict[str, object]]:
        return [
            {"n": n, "mean_ratio": m, "std_error": se}
            for n, m, se in zip(self.ns, self.means, self.std_errors)
        ]


def theorem5_growth(
    dist: BiasDistribution,
    ns: tuple[int, ...] = (50, 100, 200, 400),
    trials: int = 1000,
    seed: int = 0,
    params: Theorem5Params | None = None,
    workers: int | None = None,
) -> GrowthFit:
    """Simulated ratio on the random-walk graph for each ``n``, with a least-squares line."""
    params = theorem5_params(dist) if params is None else params
    means, ses = [], []
    for n in ns:
        rep = simulate(theorem5_graph(params, n), dist, seed=seed, trials=trials, workers=workers).report
        means.append(rep.ratio)
        ses.append(rep.std_error or 0.0)
    fit = linregress(np.asarray(ns, float), np.asarray(means))
    return GrowthFit(tuple(ns), tuple(means), tuple(ses), float(fit.slope), float(fit.intercept), float(fit.rvalue**2))


@dataclass(frozen=True)
class MonotoneCondition:
    beta_m: float
    delta_m: float

    @property
    def bound(self) -> float:
        return monotone_bound(self.beta_m, self.delta_m)


def monotone_bound(beta_m: float, delta_m: float) -> float:
    return max(1 + 1 / beta_m, 1 / (beta_m * delta_m))


def _pr_below(dist: BiasDistribution, x: np.ndarray) -> np.ndarray:
    """``Pr[B < x]``: the probability that the agent strictly prefers paying at threshold ``x``."""
    masses = dict(dist.atoms())
    at = np.array([masses.get(float(v), 0.0) for v in x])
    return np.maximum(0.0, np.asarray(dist.cdf(x), float) - at)


def theorem6_condition(dist: BiasDistribution, grid: int = 4000, max_delta: float = 10.0) -> MonotoneCondition:
    """Pick ``(beta, delta)`` minimizing the monotone-distance bound.

    For each candidate ``delta`` the largest admissible ``beta`` is
    ``min_{1 < x <= 1+delta} Pr[B < x] / (x - 1)``. Strict ``<`` follows the
    procrastinate-on-tie rule: a bias exactly at a threshold waits. Ties in
    the bound go to the larger ``delta``.
    """
    span = max_delta
    if math.isfinite(dist.upper) and dist.upper > 1:
        span = min(max_delta, dist.upper - 1 + 1.0)
    deltas = np.linspace(span / grid, span, grid)
    kinks = [b - 1 for b, _ in dist.atoms() if 0 < b - 1 <= span]
    deltas = np.unique(np.concatenate([deltas, kinks, [1.0] if span >= 1 else []]))
    xs = 1 + deltas
    deltas = xs - 1  # the exactly representable widths
    ratio = _pr_below(dist, xs) / deltas
    beta = np.minimum.accumulate(ratio)
    ok = beta > 0
    if not ok.any():
        raise ConditionUnsatisfiable("Pr[B < x] vanishes near x = 1; no beta > 0 exists")
    bounds = np.full(len(deltas), np.inf)
    bounds[ok] = np.maximum(1 + 1 / beta[ok], 1 / (beta[ok] * deltas[ok]))
    best = bounds.min()
    k = int(np.nonzero(bounds <= best + _tol(best))[0].max())
    return MonotoneCondition(float(beta[k]), float(deltas[k]))


@dataclass(frozen=True)
class Theorem6Report:
    ratio: float
    condition: MonotoneCondition

    @property
    def bound(self) -> float:
        return self.condition.bound

    @property
    def passed(self) -> bool:
        return self.ratio <= self.bound * (1 + 1e-9)


def check_theorem6(g: TaskGraph, dist: BiasDistribution, condition: MonotoneCondition | None = None) -> Theorem6Report:
    if not is_monotone_distance(g):
        raise PreconditionFailed("graph does not have the monotone distance property")
    cond = theorem6_condition(dist) if condition is None else condition
    rep = Theorem6Report(exact_ratio(g, dist).ratio, cond)
    if not rep.passed:
        raise PropertyViolation(f"ratio {rep.ratio!r} exceeds bound {rep.bound!r}", (g, rep))
    return rep
